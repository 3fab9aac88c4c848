#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "oslab/tail.hpp"

using namespace oslab;

TEST_CASE("TailVector basics: default, entry access, implicit zeros") {
  TailVector empty;
  CHECK(empty.size() == 1);
  CHECK(empty.entry(0) == 1.0);
  CHECK(empty.entry(1) == 0.0);
  CHECK(empty.entry(1000) == 0.0);

  auto u = TailVector::from_entries({1.0, 0.5, 0.25});
  CHECK(u.size() == 3);
  CHECK(u.entry(0) == 1.0);
  CHECK(u.entry(1) == 0.5);
  CHECK(u.entry(2) == 0.25);
  CHECK(u.entry(3) == 0.0);
  CHECK(u == TailVector::from_entries({1.0, 0.5, 0.25}));
  CHECK(u != empty);
}

TEST_CASE("from_entries validation") {
  CHECK_THROWS_WITH_AS(TailVector::from_entries({}), "tail must have at least entry u_0",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(TailVector::from_entries({0.999, 0.5}), "u_0 must equal 1",
                       std::invalid_argument);
  CHECK_THROWS_AS(TailVector::from_entries({1.0, 1.2}), std::invalid_argument);
  CHECK_THROWS_AS(TailVector::from_entries({1.0, -0.1}), std::invalid_argument);
  CHECK_THROWS_AS(TailVector::from_entries({1.0, std::nan("")}), std::invalid_argument);
  CHECK_THROWS_WITH_AS(TailVector::from_entries({1.0, 0.3, 0.4}),
                       "tail not nonincreasing at k=2", std::invalid_argument);
}

TEST_CASE("from_entries snaps violations within mono_tol and rejects larger ones") {
  // Tiny monotonicity overshoot: snapped down to the previous entry.
  auto u = TailVector::from_entries({1.0, 0.5, 0.5 + 1e-10}, 1e-9);
  CHECK(u.entry(2) == 0.5);

  // Tiny range overshoots: clamped back into [0,1].
  auto v = TailVector::from_entries({1.0, 1.0 + 5e-10, -5e-10}, 1e-9);
  CHECK(v.entry(1) == 1.0);
  CHECK(v.entry(2) == 0.0);

  // Violations beyond the tolerance still throw.
  CHECK_THROWS_AS(TailVector::from_entries({1.0, 0.5, 0.5 + 1e-8}, 1e-9),
                  std::invalid_argument);
  CHECK_THROWS_AS(TailVector::from_entries({1.0, 1.0 + 1e-8}, 1e-9), std::invalid_argument);
}

TEST_CASE("tail_from_counts divides by n and validates the count ladder") {
  CountTail c;
  c.m = {4, 2, 1, 0};
  auto u = tail_from_counts(c, 4);
  CHECK(u.entries() == std::vector<double>{1.0, 0.5, 0.25, 0.0});

  c.m = {3, 1};
  CHECK_THROWS_WITH_AS(tail_from_counts(c, 4), "m_0 must equal n", std::invalid_argument);
  c.m = {};
  CHECK_THROWS_WITH_AS(tail_from_counts(c, 4), "m_0 must equal n", std::invalid_argument);
  c.m = {4, 2, 3};
  CHECK_THROWS_WITH_AS(tail_from_counts(c, 4), "counts not nonincreasing at k=2",
                       std::invalid_argument);
  c.m = {4, -1};
  CHECK_THROWS_WITH_AS(tail_from_counts(c, 4), "counts not nonincreasing at k=1",
                       std::invalid_argument);
  c.m = {4};
  CHECK_THROWS_WITH_AS(tail_from_counts(c, 0), "n must be >= 1", std::invalid_argument);
}

TEST_CASE("occupancy_pmf differences the tail and trims trailing zeros") {
  auto u = TailVector::from_entries({1.0, 0.5, 0.25});
  CHECK(occupancy_pmf(u) == std::vector<double>{0.5, 0.25, 0.25});

  // Interior zero kept, trailing zero trimmed.
  CHECK(occupancy_pmf(TailVector::from_entries({1.0, 0.5, 0.5})) ==
        std::vector<double>{0.5, 0.0, 0.5});
  CHECK(occupancy_pmf(TailVector::from_entries({1.0, 0.5, 0.0})) ==
        std::vector<double>{0.5, 0.5});
  CHECK(occupancy_pmf(TailVector()) == std::vector<double>{1.0});

  // Sums to one by telescoping, and the tail is recoverable from the pmf.
  std::vector<double> geo{1.0};
  for (int k = 1; k <= 12; ++k) geo.push_back(std::pow(0.7, k));
  auto g = TailVector::from_entries(geo);
  auto p = occupancy_pmf(g);
  double total = 0.0;
  for (double x : p) total += x;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
  for (std::size_t k = 0; k < g.size(); ++k) {
    double tail_sum = 0.0;
    for (std::size_t j = k; j < p.size(); ++j) tail_sum += p[j];
    CHECK(tail_sum == doctest::Approx(g.entry(k)).epsilon(1e-12));
  }
}

TEST_CASE("rho_distance worked example and support handling") {
  auto a = TailVector::from_entries({1.0, 0.5, 0.5});
  auto b = TailVector::from_entries({1.0, 0.5, 0.0});
  CHECK(rho_distance(a, b) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(rho_distance(b, a) == doctest::Approx(0.25).epsilon(1e-15));

  // Entries past the shorter support count as zero.
  CHECK(rho_distance(TailVector(), TailVector::from_entries({1.0, 0.6})) ==
        doctest::Approx(0.6));
  CHECK(rho_distance(a, a) == 0.0);
}

TEST_CASE("rho_distance behaves as a metric on random tails") {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto random_tail = [&](std::size_t len) {
    std::vector<double> e{1.0};
    double cur = 1.0;
    for (std::size_t k = 1; k < len; ++k) {
      cur *= unif(gen);
      e.push_back(cur);
    }
    return TailVector::from_entries(e);
  };

  for (int trial = 0; trial < 50; ++trial) {
    auto a = random_tail(1 + static_cast<std::size_t>(gen() % 8));
    auto b = random_tail(1 + static_cast<std::size_t>(gen() % 8));
    auto c = random_tail(1 + static_cast<std::size_t>(gen() % 8));
    double ab = rho_distance(a, b);
    double bc = rho_distance(b, c);
    double ac = rho_distance(a, c);
    CHECK(ab >= 0.0);
    CHECK(ab == rho_distance(b, a));
    CHECK(ac <= ab + bc + 1e-15);
    if (a == b) CHECK(ab == 0.0);
  }
}

TEST_CASE("mean_occupancy sums the tail from k=1 up") {
  CHECK(mean_occupancy(TailVector()) == 0.0);
  CHECK(mean_occupancy(TailVector::from_entries({1.0, 0.5, 0.25})) == doctest::Approx(0.75));

  // Long geometric tail: closed form 1 - 0.5^99 to near machine precision.
  std::vector<double> geo{1.0};
  for (int k = 1; k < 100; ++k) geo.push_back(std::pow(0.5, k));
  double got = mean_occupancy(TailVector::from_entries(geo));
  CHECK(got == doctest::Approx(1.0 - std::pow(0.5, 99)).epsilon(1e-15));
}
