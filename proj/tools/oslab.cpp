// oslab: simulate n-queue opportunistic scheduling (LCQ, LCQ(d), LCQ(d_n)),
// solve the mean-field dynamics and equilibria, and compare the two.
//
// Subcommands: simulate, fluid, fixedpoint, bd-eq, compare, sweep, scaling.
// Every subcommand accepts --config FILE (JSON, keys named after the flags);
// explicit flags override config-file values.  Exit codes: 0 success,
// 1 validation error, 2 runtime failure, 3 threshold breach under --assert.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "oslab/equilibrium.hpp"
#include "oslab/harness.hpp"
#include "oslab/io.hpp"
#include "oslab/meanfield.hpp"
#include "oslab/params.hpp"
#include "oslab/simulator.hpp"
#include "oslab/tail.hpp"

namespace {

using nlohmann::json;
using namespace oslab;

struct Vars {
  int64_t n = 10000;
  double lambda = 0.5;
  double q = 0.5;
  std::string policy = "lcqd";
  int d = 2;
  double dn_exp = 0.5;
  std::string mode = "faithful";
  double t_end = 100.0;
  double burn_in = -1.0;
  uint64_t seed = 1;
  double sample_interval = 0.1;
  int replicas = 1;
  int jobs = 0;
  int k_report = 10;
  int k_max = 0;
  double dt = 1e-3;
  bool do_assert = false;
  bool delay_only = false;
  std::string out;
  std::string config_file;
  std::vector<double> v0;
  std::vector<int32_t> initial_lengths;
  std::vector<double> lambda_grid;
  std::vector<int> d_values = {1, 2, 4, 8};
  std::vector<double> q_values = {0.3, 0.5, 0.8};
  std::vector<int64_t> n_grid = {100, 1000, 10000};
};

// Ties a CLI option to a config-file key: after parsing, config values fill
// in any option the command line left untouched.
struct Binder {
  CLI::App* sub = nullptr;
  std::vector<std::function<void(const json&)>> appliers;

  template <typename T>
  CLI::Option* opt(const std::string& flag, T& var, const std::string& desc,
                   const char* key) {
    CLI::Option* o = sub->add_option(flag, var, desc);
    appliers.push_back([o, &var, key](const json& j) {
      if (o->count() == 0 && j.contains(key)) var = j.at(key).get<T>();
    });
    return o;
  }

  CLI::Option* flag(const std::string& name, bool& var, const std::string& desc,
                    const char* key) {
    CLI::Option* o = sub->add_flag(name, var, desc);
    appliers.push_back([o, &var, key](const json& j) {
      if (o->count() == 0 && j.contains(key)) var = j.at(key).get<bool>();
    });
    return o;
  }

  void apply(const json& j) {
    for (const auto& f : appliers) f(j);
  }
};

struct Sub {
  CLI::App* app = nullptr;
  Binder binder;
  std::function<int()> handler;
};

PolicySpec build_policy(const Vars& v) {
  const PolicyKind kind = policy_kind_from_string(v.policy);
  const SelectionMode mode = selection_mode_from_string(v.mode);
  switch (kind) {
    case PolicyKind::Lcq: return PolicySpec::lcq();
    case PolicyKind::LcqD: return PolicySpec::lcqd(v.d, mode);
    case PolicyKind::LcqDn: return PolicySpec::lcqdn(DnRule{v.dn_exp}, mode);
  }
  throw std::invalid_argument("unknown policy: " + v.policy);
}

RunConfig build_run_config(const Vars& v) {
  RunConfig rc;
  rc.params = SystemParams{v.n, v.lambda, v.q, build_policy(v)};
  rc.t_end = v.t_end;
  rc.burn_in = v.burn_in;
  rc.seed = v.seed;
  rc.sample_interval = v.sample_interval;
  if (!v.initial_lengths.empty()) rc.initial_lengths = v.initial_lengths;
  return rc;
}

void add_system_options(Binder& b, Vars& v, bool with_policy) {
  b.opt("--n", v.n, "number of queues", "n");
  b.opt("--lambda", v.lambda, "per-queue arrival rate, in (0,1)", "lambda");
  b.opt("--q", v.q, "channel connection probability, in (0,1]", "q");
  if (with_policy) {
    b.opt("--policy", v.policy, "scheduling policy: lcq, lcqd, lcqdn", "policy");
    b.opt("--d", v.d, "candidate-set size for lcqd", "d");
    b.opt("--dn-exp", v.dn_exp, "exponent a of d_n = ceil(n^a) for lcqdn", "dn_exp");
    b.opt("--mode", v.mode, "candidate sampling: faithful or physical", "mode");
  }
}

void add_run_options(Binder& b, Vars& v) {
  b.opt("--t-end", v.t_end, "simulation horizon", "t_end");
  b.opt("--burn-in", v.burn_in, "statistics window start (default t_end/2)", "burn_in");
  b.opt("--seed", v.seed, "base RNG seed", "seed");
  b.opt("--sample-interval", v.sample_interval, "consistency-check spacing",
        "sample_interval");
  b.opt("--replicas", v.replicas, "independent replicas", "replicas");
  b.opt("--jobs", v.jobs, "replica worker threads (0 = host parallelism)", "jobs");
}

void add_common_tail(Sub& s, Vars& v) {
  s.binder.opt("--out", v.out, "output directory for artifacts", "out");
  s.app->add_option("--config", v.config_file, "JSON config file; flags override");
}

void print_json(const json& payload) { std::cout << payload.dump(2) << "\n"; }

int do_simulate(Vars& v) {
  ExperimentConfig cfg;
  cfg.mode = ExperimentMode::Simulate;
  cfg.run = build_run_config(v);
  validate_params(cfg.run.params);
  cfg.replicas = v.replicas;
  cfg.jobs = v.jobs;
  cfg.output_dir = v.out;

  const std::vector<RunResult> results = run_replicas(cfg.run, cfg.replicas, cfg.jobs);
  const json identity = experiment_identity(cfg);
  const std::string hash = config_hash_hex(identity);

  if (v.out.empty()) {
    print_json(json{{"config", identity}, {"config_hash", hash}, {"results", results}});
    return 0;
  }
  std::filesystem::create_directories(v.out);
  const std::filesystem::path dir(v.out);
  for (size_t i = 0; i < results.size(); ++i) {
    const std::string tag = std::to_string(i);
    json result_json{{"config", identity},
                     {"config_hash", hash},
                     {"replica", i},
                     {"result", results[i]}};
    write_text_file((dir / ("result_" + tag + ".json")).string(),
                    result_json.dump(2) + "\n");
    CsvTable t = tail_csv(results[i].time_avg_tail);
    t.comments = artifact_header(identity, results[i].seed);
    write_text_file((dir / ("tail_" + tag + ".csv")).string(), csv_to_string(t));
  }
  if (results.size() > 1) {
    CsvTable t = tail_csv(mean_tail(results));
    t.comments = artifact_header(identity, cfg.run.seed);
    write_text_file((dir / "mean_tail.csv").string(), csv_to_string(t));
  }
  return 0;
}

int do_fluid(Vars& v) {
  const PolicyKind kind = policy_kind_from_string(v.policy);
  if (kind == PolicyKind::LcqDn) {
    throw std::invalid_argument("fluid supports policies lcq and lcqd");
  }
  const TailVector v0 =
      v.v0.empty() ? TailVector{} : TailVector::from_entries(v.v0, 1e-12);

  ExperimentConfig cfg;
  cfg.mode = ExperimentMode::Fluid;
  cfg.run = build_run_config(v);
  cfg.fluid_v0 = v0;
  cfg.integrate.dt = v.dt;
  cfg.output_dir = v.out;

  FluidTrajectory traj;
  if (kind == PolicyKind::Lcq) {
    traj = lcq_fluid_trajectory(v0, v.lambda, v.t_end, cfg.integrate);
  } else {
    if (v.d < 1) throw std::invalid_argument("d >= 1 required");
    traj = integrate_lcqd(v0, v.lambda, v.d, v.t_end, cfg.integrate);
  }

  const json identity = experiment_identity(cfg);
  const std::string hash = config_hash_hex(identity);
  const json summary{{"config", identity},
                     {"config_hash", hash},
                     {"policy", to_string(traj.policy)},
                     {"final_time", traj.final_time()},
                     {"final_state", traj.final_state()},
                     {"monotonicity_repairs", traj.monotonicity_repairs},
                     {"states_recorded", traj.times.size()}};
  if (v.out.empty()) {
    print_json(summary);
    return 0;
  }
  std::filesystem::create_directories(v.out);
  const std::filesystem::path dir(v.out);
  write_text_file((dir / "fluid.json").string(), summary.dump(2) + "\n");
  CsvTable t = trajectory_csv(traj);
  t.comments = artifact_header(identity);
  write_text_file((dir / "trajectory.csv").string(), csv_to_string(t));
  return 0;
}

int do_fixedpoint(Vars& v) {
  if (v.delay_only) {
    std::cout << format_double(delay_lcqd(v.lambda, v.d)) << "\n";
    return 0;
  }
  FixedPointOptions opts;
  if (v.k_max > 0) opts.k_max = v.k_max;
  const FixedPoint fp = fixed_point(v.lambda, v.d, opts);
  const json identity{{"mode", "fixedpoint"},
                      {"lambda", v.lambda},
                      {"d", v.d},
                      {"k_max", opts.k_max}};
  const json payload{{"config", identity},
                     {"config_hash", config_hash_hex(identity)},
                     {"fixed_point", fp},
                     {"delay", delay_lcqd(v.lambda, v.d)}};
  if (v.out.empty()) {
    print_json(payload);
    return 0;
  }
  std::filesystem::create_directories(v.out);
  const std::filesystem::path dir(v.out);
  write_text_file((dir / "fixed_point.json").string(), payload.dump(2) + "\n");
  CsvTable t = fixed_point_csv(fp);
  t.comments = artifact_header(identity);
  write_text_file((dir / "fixed_point.csv").string(), csv_to_string(t));
  return 0;
}

int do_bd_eq(Vars& v) {
  if (v.delay_only) {
    std::cout << format_double(delay_lcq_normalized(v.lambda, v.q)) << "\n";
    return 0;
  }
  const BirthDeathEquilibrium bd = bd_equilibrium(v.lambda, v.q);
  const json identity{{"mode", "bd-eq"}, {"lambda", v.lambda}, {"q", v.q}};
  const json payload{{"config", identity},
                     {"config_hash", config_hash_hex(identity)},
                     {"bd_equilibrium", bd},
                     {"normalized_delay", delay_lcq_normalized(v.lambda, v.q)}};
  if (v.out.empty()) {
    print_json(payload);
    return 0;
  }
  std::filesystem::create_directories(v.out);
  const std::filesystem::path dir(v.out);
  write_text_file((dir / "bd_equilibrium.json").string(), payload.dump(2) + "\n");
  CsvTable t = bd_csv(bd);
  t.comments = artifact_header(identity);
  write_text_file((dir / "bd_equilibrium.csv").string(), csv_to_string(t));
  return 0;
}

int do_compare(Vars& v) {
  ExperimentConfig cfg;
  cfg.mode = ExperimentMode::Compare;
  cfg.run = build_run_config(v);
  cfg.replicas = v.replicas;
  cfg.jobs = v.jobs;
  cfg.k_report = v.k_report;
  cfg.assert_thresholds = v.do_assert;
  cfg.output_dir = v.out;

  const ComparisonReport rep = cmd_compare(cfg);
  for (const std::string& w : rep.warnings) std::cerr << "warning: " << w << "\n";
  const json identity = experiment_identity(cfg);
  print_json(json{{"config", identity},
                        {"config_hash", config_hash_hex(identity)},
                        {"report", rep}});
  if (v.do_assert && rep.breach) {
    std::cerr << "error: comparison metrics breached the acceptance thresholds\n";
    return 3;
  }
  return 0;
}

int do_sweep(Vars& v) {
  ExperimentConfig cfg;
  cfg.mode = ExperimentMode::Sweep;
  cfg.lambda_grid = v.lambda_grid;
  cfg.sweep_d_values = v.d_values;
  cfg.sweep_q_values = v.q_values;
  cfg.output_dir = v.out;

  const std::vector<SweepRow> rows = cmd_sweep_delay(cfg);
  if (v.out.empty()) std::cout << csv_to_string(sweep_csv_table(cfg, rows));
  return 0;
}

int do_scaling(Vars& v) {
  ExperimentConfig cfg;
  cfg.mode = ExperimentMode::Scaling;
  cfg.run = build_run_config(v);
  cfg.run.params.policy =
      PolicySpec::lcqdn(DnRule{v.dn_exp}, selection_mode_from_string(v.mode));
  cfg.replicas = v.replicas;
  cfg.jobs = v.jobs;
  cfg.n_grid = v.n_grid;
  cfg.output_dir = v.out;

  const std::vector<ScalingRow> rows = cmd_scaling_lcqdn(cfg);
  if (v.out.empty()) std::cout << csv_to_string(scaling_csv_table(cfg, rows));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulation and numerical analysis of opportunistic transmission "
               "scheduling over parallel queues with on/off channels"};
  app.require_subcommand(1);
  Vars v;
  std::vector<Sub> subs;

  {
    Sub s;
    s.app = app.add_subcommand("simulate", "run the exact finite-n simulation");
    s.binder.sub = s.app;
    add_system_options(s.binder, v, true);
    add_run_options(s.binder, v);
    s.binder.opt("--initial-lengths", v.initial_lengths,
                 "explicit initial queue lengths (default: empty system)",
                 "initial_lengths")
        ->delimiter(',');
    add_common_tail(s, v);
    s.handler = [&v]() { return do_simulate(v); };
    subs.push_back(std::move(s));
  }
  {
    Sub s;
    s.app = app.add_subcommand("fluid", "integrate the mean-field dynamics");
    s.binder.sub = s.app;
    s.binder.opt("--lambda", v.lambda, "arrival rate, in (0,1)", "lambda");
    s.binder.opt("--policy", v.policy, "lcq (piecewise fluid) or lcqd (ODE)", "policy");
    s.binder.opt("--d", v.d, "candidate-set size for lcqd", "d");
    s.binder.opt("--t-end", v.t_end, "integration horizon", "t_end");
    s.binder.opt("--dt", v.dt, "RK4 step size", "dt");
    s.binder.opt("--v0", v.v0, "initial tail entries, e.g. 1,0.6,0.2", "v0")
        ->delimiter(',');
    add_common_tail(s, v);
    s.handler = [&v]() { return do_fluid(v); };
    subs.push_back(std::move(s));
  }
  {
    Sub s;
    s.app = app.add_subcommand("fixedpoint", "compute the LCQ(d) fixed point v*");
    s.binder.sub = s.app;
    s.binder.opt("--lambda", v.lambda, "arrival rate, in (0,1)", "lambda");
    s.binder.opt("--d", v.d, "candidate-set size", "d");
    s.binder.opt("--k-max", v.k_max, "truncation level (0 = until underflow floor)",
                 "k_max");
    s.binder.flag("--delay", v.delay_only, "print only the Little's-law delay", "delay");
    add_common_tail(s, v);
    s.handler = [&v]() { return do_fixedpoint(v); };
    subs.push_back(std::move(s));
  }
  {
    Sub s;
    s.app = app.add_subcommand("bd-eq", "compute the LCQ occupancy equilibrium");
    s.binder.sub = s.app;
    s.binder.opt("--lambda", v.lambda, "arrival rate, in (0,1)", "lambda");
    s.binder.opt("--q", v.q, "channel connection probability, in (0,1]", "q");
    s.binder.flag("--delay", v.delay_only, "print only the normalized delay", "delay");
    add_common_tail(s, v);
    s.handler = [&v]() { return do_bd_eq(v); };
    subs.push_back(std::move(s));
  }
  {
    Sub s;
    s.app = app.add_subcommand("compare", "simulate and compare against theory");
    s.binder.sub = s.app;
    add_system_options(s.binder, v, true);
    add_run_options(s.binder, v);
    s.binder.opt("--k-report", v.k_report, "tail levels compared", "k_report");
    s.binder.flag("--assert", v.do_assert, "exit 3 if thresholds are breached", "assert");
    add_common_tail(s, v);
    s.handler = [&v]() { return do_compare(v); };
    subs.push_back(std::move(s));
  }
  {
    Sub s;
    s.app = app.add_subcommand("sweep", "evaluate the asymptotic delay curves");
    s.binder.sub = s.app;
    s.binder.opt("--lambda-grid", v.lambda_grid, "lambda grid (default 0.05..0.95)",
                 "lambda_grid")
        ->delimiter(',');
    s.binder.opt("--d-values", v.d_values, "d values for the LCQ(d) family", "d_values")
        ->delimiter(',');
    s.binder.opt("--q-values", v.q_values, "q values for the LCQ family", "q_values")
        ->delimiter(',');
    add_common_tail(s, v);
    s.handler = [&v]() { return do_sweep(v); };
    subs.push_back(std::move(s));
  }
  {
    Sub s;
    s.app = app.add_subcommand("scaling", "LCQ(d_n) occupancy scaling across n");
    s.binder.sub = s.app;
    s.binder.opt("--lambda", v.lambda, "arrival rate, in (0,1)", "lambda");
    s.binder.opt("--q", v.q, "channel connection probability", "q");
    s.binder.opt("--dn-exp", v.dn_exp, "exponent a of d_n = ceil(n^a)", "dn_exp");
    s.binder.opt("--mode", v.mode, "candidate sampling: faithful or physical", "mode");
    s.binder.opt("--n-grid", v.n_grid, "system sizes", "n_grid")->delimiter(',');
    add_run_options(s.binder, v);
    add_common_tail(s, v);
    s.handler = [&v]() { return do_scaling(v); };
    subs.push_back(std::move(s));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    for (Sub& s : subs) {
      if (!app.got_subcommand(s.app)) continue;
      if (!v.config_file.empty()) {
        s.binder.apply(json::parse(read_text_file(v.config_file)));
      }
      return s.handler();
    }
    std::cerr << "error: no subcommand given\n";
    return 1;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
