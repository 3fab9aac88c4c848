#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "oslab/equilibrium.hpp"
#include "oslab/io.hpp"
#include "oslab/meanfield.hpp"
#include "oslab/params.hpp"
#include "oslab/simulator.hpp"

using namespace oslab;
using nlohmann::json;

TEST_CASE("format_double emits shortest round-tripping decimals") {
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.0) == "0");
  CHECK(format_double(-2.25) == "-2.25");
  CHECK(format_double(0.1) == "0.1");  // shortest form, not 0.1000000000000000055...

  for (double x : {1.0 / 3.0, 0.2928932188134525, 1e-300, 6.02e23, -1234.5678}) {
    std::string s = format_double(x);
    CHECK(std::stod(s) == x);
  }
}

TEST_CASE("fnv1a64 matches known vectors") {
  // Standard FNV-1a 64-bit test vectors.
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);

  json j = {{"b", 1}, {"a", 2}};
  std::string hex = config_hash_hex(j);
  CHECK(hex.size() == 16);
  CHECK(hex == config_hash_hex(j));  // stable
  // nlohmann::json orders keys, so logically equal configs hash equal.
  json k = {{"a", 2}, {"b", 1}};
  CHECK(config_hash_hex(k) == hex);
}

TEST_CASE("PolicySpec and SystemParams JSON round-trip") {
  for (auto spec : {PolicySpec::lcq(), PolicySpec::lcqd(3, SelectionMode::Physical),
                    PolicySpec::lcqdn(DnRule{0.5}, SelectionMode::GeneratorFaithful)}) {
    json j = spec;
    auto back = j.get<PolicySpec>();
    CHECK(back.kind == spec.kind);
    CHECK(back.d == spec.d);
    CHECK(back.dn_rule.has_value() == spec.dn_rule.has_value());
    if (spec.dn_rule) CHECK(back.dn_rule->exponent == spec.dn_rule->exponent);
    CHECK(back.selection_mode == spec.selection_mode);
  }

  SystemParams p;
  p.n = 500;
  p.lambda = 0.7;
  p.q = 0.3;
  p.policy = PolicySpec::lcqd(4, SelectionMode::GeneratorFaithful);
  json j = p;
  CHECK(j["n"] == 500);
  CHECK(j["policy"]["kind"] == "lcqd");
  auto back = j.get<SystemParams>();
  CHECK(back.n == 500);
  CHECK(back.lambda == 0.7);
  CHECK(back.q == 0.3);
  CHECK(back.policy.d == 4);
}

TEST_CASE("TailVector serializes as a plain array and validates on the way in") {
  auto u = TailVector::from_entries({1.0, 0.5, 0.25});
  json j = u;
  CHECK(j.is_array());
  CHECK(j.size() == 3);
  CHECK(j[0] == 1.0);
  CHECK(j.get<TailVector>() == u);

  json bad = {0.9, 0.5};
  CHECK_THROWS_AS(bad.get<TailVector>(), std::invalid_argument);
}

TEST_CASE("CountTail and RunConfig JSON round-trip with defaults") {
  CountTail c{{6, 3, 1}, 2.5};
  json jc = c;
  auto cb = jc.get<CountTail>();
  CHECK(cb.m == c.m);
  CHECK(cb.time == 2.5);

  RunConfig cfg;
  cfg.params.n = 10;
  cfg.params.policy = PolicySpec::lcqd(2, SelectionMode::Physical);
  cfg.t_end = 25.0;
  cfg.seed = 99;
  cfg.initial_lengths = std::vector<int32_t>{1, 0, 2, 0, 0, 0, 0, 0, 0, 1};
  json j = cfg;
  auto back = j.get<RunConfig>();
  CHECK(back.params.n == 10);
  CHECK(back.t_end == 25.0);
  CHECK(back.burn_in == cfg.burn_in);
  CHECK(back.seed == 99);
  CHECK(back.initial_lengths == cfg.initial_lengths);

  // Missing optional keys fall back to defaults.
  json partial = {{"params", json(cfg.params)}, {"t_end", 7.5}};
  auto sparse = partial.get<RunConfig>();
  CHECK(sparse.t_end == 7.5);
  CHECK(sparse.burn_in == -1.0);
  CHECK(sparse.seed == 1);
  CHECK(sparse.sample_interval == 0.1);
  CHECK_FALSE(sparse.initial_lengths.has_value());
}

TEST_CASE("RunResult serialization exposes the documented fields") {
  RunConfig cfg;
  cfg.params.n = 5;
  cfg.params.lambda = 0.5;
  cfg.params.q = 0.5;
  cfg.params.policy = PolicySpec::lcq();
  cfg.t_end = 10.0;
  cfg.seed = 4;
  json j = run(cfg);
  CHECK(j.contains("time_avg_tail"));
  CHECK(j["time_avg_tail"].is_array());
  CHECK(j["time_avg_tail"][0] == 1.0);
  CHECK(j.contains("total_occupancy_hist"));
  CHECK(j.contains("max_queue_hist"));
  CHECK(j.contains("mean_sojourn"));
  CHECK(j.contains("sojourn_count"));
  CHECK(j["little_check"].contains("arrival_rate_x_sojourn"));
  CHECK(j["little_check"].contains("time_avg_occupancy"));
  CHECK(j["little_check"].contains("within_5pct"));
  CHECK(j["event_counts"].contains("arrivals"));
  CHECK(j["seed"] == 4);
}

TEST_CASE("csv_to_string layout: comments, header, LF-only, '.' decimals") {
  CsvTable t;
  t.comments = {"config_hash=00ff", "seed=3"};
  t.columns = {"k", "value"};
  t.rows = {{"0", "1"}, {"1", format_double(0.5)}};
  std::string s = csv_to_string(t);
  CHECK(s ==
        "# config_hash=00ff\n"
        "# seed=3\n"
        "k,value\n"
        "0,1\n"
        "1,0.5\n");
  CHECK(s.find('\r') == std::string::npos);

  std::ostringstream os;
  write_csv(os, t);
  CHECK(os.str() == s);
}

TEST_CASE("artifact_header carries hash, optional seed, and the config dump") {
  json cfg = {{"mode", "simulate"}, {"t_end", 10.0}};
  auto lines = artifact_header(cfg, 42);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "config_hash=" + config_hash_hex(cfg));
  CHECK(lines[1] == "seed=42");
  CHECK(lines[2] == "config=" + cfg.dump());

  auto no_seed = artifact_header(cfg);
  REQUIRE(no_seed.size() == 2);
  CHECK(no_seed[0] == lines[0]);
  CHECK(no_seed[1] == lines[2]);
}

TEST_CASE("canned CSV builders produce the documented columns") {
  auto u = TailVector::from_entries({1.0, 0.5});
  auto t1 = tail_csv(u);
  CHECK(t1.columns == std::vector<std::string>{"k", "time_avg_u_k"});
  REQUIRE(t1.rows.size() == 2);
  CHECK(t1.rows[0] == std::vector<std::string>{"0", "1"});
  CHECK(t1.rows[1] == std::vector<std::string>{"1", "0.5"});

  auto fp = fixed_point(0.5, 2);
  auto t2 = fixed_point_csv(fp);
  CHECK(t2.columns == std::vector<std::string>{"k", "v_star_k", "p_k"});
  CHECK(t2.rows.size() == fp.v_star.size());
  CHECK(t2.rows[0][1] == "1");

  auto bd = bd_equilibrium(0.5, 0.5);
  auto t3 = bd_csv(bd);
  CHECK(t3.columns == std::vector<std::string>{"j", "pi_j"});
  CHECK(t3.rows.size() == bd.pi.size());

  auto traj = integrate_lcqd(TailVector(), 0.5, 2, 1.0);
  auto t4 = trajectory_csv(traj);
  REQUIRE(t4.columns.size() >= 2);
  CHECK(t4.columns[0] == "t");
  CHECK(t4.columns[1] == "v_1");
  CHECK(t4.rows.size() == traj.times.size());
  // Every row has one cell per column.
  for (const auto& row : t4.rows) CHECK(row.size() == t4.columns.size());
}

TEST_CASE("write_text_file and read_text_file round-trip bytes") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "oslab_io_test";
  fs::create_directories(dir);
  fs::path file = dir / "sample.csv";

  std::string payload = "# header\na,b\n1,2\n";
  write_text_file(file.string(), payload);
  CHECK(read_text_file(file.string()) == payload);

  // Overwrite, not append.
  write_text_file(file.string(), "x\n");
  CHECK(read_text_file(file.string()) == "x\n");

  CHECK_THROWS_AS(read_text_file((dir / "missing.csv").string()), std::runtime_error);
  fs::remove_all(dir);
}

TEST_CASE("FixedPoint, BirthDeathEquilibrium, FluidTrajectory JSON shapes") {
  json jf = fixed_point(0.5, 2);
  CHECK(jf["lambda"] == 0.5);
  CHECK(jf["d"] == 2);
  CHECK(jf["v_star"].is_array());
  CHECK(jf["p"].is_array());

  json jb = bd_equilibrium(0.5, 0.5);
  CHECK(jb["lambda"] == 0.5);
  CHECK(jb["q"] == 0.5);
  CHECK(jb["pi"].is_array());
  CHECK(jb.contains("mean_occupancy"));
  CHECK(jb.contains("truncation_mass"));

  json jt = integrate_lcqd(TailVector(), 0.5, 2, 0.5);
  CHECK(jt["policy"] == "lcqd");
  CHECK(jt["times"].is_array());
  CHECK(jt["states"].is_array());
  CHECK(jt["states"].size() == jt["times"].size());
  CHECK(jt.contains("monotonicity_repairs"));
}
