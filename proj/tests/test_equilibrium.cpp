#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "oslab/equilibrium.hpp"
#include "oslab/tail.hpp"

using namespace oslab;

TEST_CASE("fixed_point pins the frozen lambda=0.5 d=2 values") {
  auto fp = fixed_point(0.5, 2);
  // Independently derived to 22 significant digits; compare at 1e-15 relative.
  const std::vector<double> want{
      0.2928932188134524755992,  0.07612046748871324387182, 0.01921471959676955087382,
      0.004815273327803113755163, 0.001204543794827607285228, 0.0003011813037957798842344};
  for (std::size_t k = 1; k <= want.size(); ++k)
    CHECK(fp.v_star.entry(k) == doctest::Approx(want[k - 1]).epsilon(1e-15));
  CHECK(fp.lambda == 0.5);
  CHECK(fp.d == 2);
  CHECK(fp.v_star.entry(1) == doctest::Approx(1.0 - std::sqrt(0.5)).epsilon(1e-15));
}

TEST_CASE("fixed_point pins the frozen lambda=0.7 d=2 values") {
  auto fp = fixed_point(0.7, 2);
  const std::vector<double> want{
      0.452277442494833886543,    0.1733163904772175299374,   0.06262146031288526780978,
      0.02216311289613321699002,  0.007787411401817202227854, 0.0027293185805932064373,
      0.0009557182018482943215788, 0.000334557334952088134399, 0.0001171019236634936923917,
      0.00004098651322935614243012};
  for (std::size_t k = 1; k <= want.size(); ++k)
    CHECK(fp.v_star.entry(k) == doctest::Approx(want[k - 1]).epsilon(1e-15));
}

TEST_CASE("fixed_point residual is tiny across a lambda x d grid") {
  for (double lambda : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    for (int d : {1, 2, 4, 8, 16}) {
      CAPTURE(lambda);
      CAPTURE(d);
      auto fp = fixed_point(lambda, d);
      CHECK(fixed_point_residual(fp) < 1e-12);
      // p is the occupancy pmf of v*.
      CHECK(fp.p == occupancy_pmf(fp.v_star));
      // Domination bound v*_k <= lambda^k.
      double pow_l = 1.0;
      for (std::size_t k = 1; k < fp.v_star.size(); ++k) {
        pow_l *= lambda;
        CHECK(fp.v_star.entry(k) <= pow_l * (1.0 + 1e-12));
      }
    }
  }
}

TEST_CASE("fixed_point d=1 is the exact geometric lambda^k") {
  auto fp = fixed_point(0.7, 1);
  double pow_l = 1.0;
  for (std::size_t k = 1; k < fp.v_star.size() && pow_l > 1e-250; ++k) {
    pow_l *= 0.7;
    CHECK(fp.v_star.entry(k) == doctest::Approx(pow_l).epsilon(1e-14));
  }
  CHECK(fp.v_star.size() > 100);  // runs deep before hitting the floor
}

TEST_CASE("fixed_point argument validation") {
  CHECK_THROWS_WITH_AS(fixed_point(0.0, 2), "lambda must be in (0,1)", std::invalid_argument);
  CHECK_THROWS_WITH_AS(fixed_point(1.0, 2), "lambda must be in (0,1)", std::invalid_argument);
  CHECK_THROWS_WITH_AS(fixed_point(0.5, 0), "d >= 1 required", std::invalid_argument);
}

TEST_CASE("tail_ratios pins the frozen c_k values and flattens out") {
  auto fp = fixed_point(0.5, 2);
  auto diag = tail_ratios(fp);
  REQUIRE(diag.c.size() >= 3);
  CHECK(diag.c[0] == 1.0);
  CHECK(diag.c[1] == doctest::Approx(1.171572875253809902397).epsilon(1e-14));
  CHECK(diag.c[2] == doctest::Approx(1.217927479819411901949).epsilon(1e-14));

  // At lambda=0.7 the ratios converge: c_k >= 1 and successive ratios settle
  // to within 0.1% over k in [30, 200].
  for (int d : {2, 4, 8}) {
    CAPTURE(d);
    auto fp7 = fixed_point(0.7, d);
    auto dg = tail_ratios(fp7, 200);
    REQUIRE(dg.c.size() >= 201);
    for (std::size_t k = 30; k <= 200; ++k) {
      CHECK(dg.c[k] >= 1.0 - 1e-9);
      CHECK(std::abs(dg.c[k] / dg.c[k - 1] - 1.0) < 1e-3);
    }
  }
}

TEST_CASE("tail_ratios reports truncation when the range outruns the floor") {
  auto fp = fixed_point(0.3, 4);  // decays like (0.075)^k: underflows fast
  auto full = tail_ratios(fp);
  CHECK_FALSE(full.truncated_early);
  auto clipped = tail_ratios(fp, static_cast<int>(fp.v_star.size()) + 500);
  CHECK(clipped.truncated_early);
}

TEST_CASE("bd_equilibrium pins the frozen lambda=0.5 q=0.5 law") {
  auto eq = bd_equilibrium(0.5, 0.5);
  const std::vector<double> want{
      0.2887880950866024212789, 0.2887880950866024212789, 0.1925253967244016141859,
      0.1100145124139437795348, 0.0586744066207700157519, 0.0302835647074942016784};
  REQUIRE(eq.pi.size() >= want.size());
  for (std::size_t j = 0; j < want.size(); ++j)
    CHECK(std::abs(eq.pi[j] - want[j]) < 1e-12);
  CHECK(std::abs(eq.mean_occupancy - 1.606695152415291763783) < 1e-10);
  CHECK(eq.truncation_mass < 1e-12);
  CHECK(eq.lambda == 0.5);
  CHECK(eq.q == 0.5);
}

TEST_CASE("bd_equilibrium satisfies detailed balance and normalization") {
  for (double lambda : {0.2, 0.5, 0.8}) {
    for (double q : {0.3, 0.7, 1.0}) {
      CAPTURE(lambda);
      CAPTURE(q);
      auto eq = bd_equilibrium(lambda, q);
      double total = 0.0;
      for (double x : eq.pi) total += x;
      CHECK(std::abs(total - 1.0) < 1e-12);
      for (std::size_t j = 1; j < eq.pi.size(); ++j) {
        double death = -std::expm1(static_cast<double>(j) * std::log1p(-q));
        if (q == 1.0) death = 1.0;
        CHECK(std::abs(eq.pi[j - 1] * lambda - eq.pi[j] * death) < 1e-12);
      }
    }
  }
}

TEST_CASE("bd_equilibrium q=1 reduces to M/M/1 geometric") {
  auto eq = bd_equilibrium(0.6, 1.0);
  double pj = 0.4;  // (1 - lambda) * lambda^j
  for (std::size_t j = 0; j < eq.pi.size(); ++j) {
    CHECK(eq.pi[j] == doctest::Approx(pj).epsilon(1e-12));
    pj *= 0.6;
  }
  CHECK(std::abs(eq.mean_occupancy - 0.6 / 0.4) < 1e-10);
}

TEST_CASE("bd_equilibrium light traffic concentrates on the empty state") {
  auto eq = bd_equilibrium(1e-6, 0.5);
  CHECK(eq.pi[0] > 1.0 - 1e-5);
  CHECK(eq.mean_occupancy < 3e-6);
}

TEST_CASE("delay_lcqd worked values and limits") {
  // d=1 is M/M/1: W = 1/(1-lambda) -> 2 at lambda=0.5.
  CHECK(delay_lcqd(0.5, 1) == doctest::Approx(2.0).epsilon(1e-12));
  // Frozen sum/delay for lambda=0.5 d=2.
  CHECK(delay_lcqd(0.5, 2) == doctest::Approx(0.789299604250331118442).epsilon(1e-13));
  // Light traffic with d=2: v*_1 ~ lambda/2, deeper levels negligible, so
  // the delay tends to 1/d = 1/2.
  CHECK(delay_lcqd(1e-8, 2) == doctest::Approx(0.5).epsilon(1e-6));

  // Strictly decreasing in d at fixed lambda, pinned against the frozen table.
  const std::vector<double> table{
      3.33333333333333333,  1.03195081425506025,  0.629523033525888179,
      0.45630081870881709,  0.358827007333991431, 0.296037298279184413,
      0.252112358156660639, 0.219618485409167746};
  for (int d = 1; d <= 8; ++d) {
    CHECK(delay_lcqd(0.7, d) == doctest::Approx(table[d - 1]).epsilon(1e-12));
    if (d > 1) CHECK(delay_lcqd(0.7, d) < delay_lcqd(0.7, d - 1));
  }
}

TEST_CASE("delay_lcq_normalized worked values and monotonicity") {
  // Frozen lambda=0.5 q=0.5 value (tolerance reflects the mass-truncation
  // error bound of the series, ~1e-12).
  CHECK(std::abs(delay_lcq_normalized(0.5, 0.5) - 3.213390304830583527567) < 1e-9);
  // q=1: M/M/1, n W = J/lambda = 1/(1-lambda).
  CHECK(delay_lcq_normalized(0.4, 1.0) == doctest::Approx(1.0 / 0.6).epsilon(1e-10));
  // Light traffic: one packet in an n-queue system waits ~1/q scheduling
  // instants for its channel to come up.
  CHECK(delay_lcq_normalized(1e-7, 0.3) == doctest::Approx(1.0 / 0.3).epsilon(1e-5));
  // Increasing in lambda at fixed q.
  double prev = 0.0;
  for (double lambda : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    double w = delay_lcq_normalized(lambda, 0.5);
    CHECK(w > prev);
    prev = w;
  }
}
