// Experiment orchestration: the replica pool, sim-vs-theory comparison, the
// delay sweep, and the LCQ(d_n) scaling study, with artifact emission.

#include "oslab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <stdexcept>
#include <thread>

#include "oslab/io.hpp"

namespace oslab {

std::string to_string(ExperimentMode mode) {
  switch (mode) {
    case ExperimentMode::Simulate: return "simulate";
    case ExperimentMode::Fluid: return "fluid";
    case ExperimentMode::FixedPoint: return "fixedpoint";
    case ExperimentMode::BdEq: return "bd-eq";
    case ExperimentMode::Compare: return "compare";
    case ExperimentMode::Sweep: return "sweep";
    case ExperimentMode::Scaling: return "scaling";
  }
  return "unknown";
}

nlohmann::json experiment_identity(const ExperimentConfig& cfg) {
  nlohmann::json j{{"mode", to_string(cfg.mode)}};
  switch (cfg.mode) {
    case ExperimentMode::Simulate:
      j["run"] = cfg.run;
      j["replicas"] = cfg.replicas;
      break;
    case ExperimentMode::Compare:
      j["run"] = cfg.run;
      j["replicas"] = cfg.replicas;
      j["k_report"] = cfg.k_report;
      j["thresholds"] = {{"max_abs_tail_gap", cfg.thresholds.max_abs_tail_gap},
                         {"rho_gap", cfg.thresholds.rho_gap},
                         {"tv_occupancy", cfg.thresholds.tv_occupancy},
                         {"p_max_le_1_min", cfg.thresholds.p_max_le_1_min}};
      break;
    case ExperimentMode::Scaling:
      j["run"] = cfg.run;
      j["replicas"] = cfg.replicas;
      j["n_grid"] = cfg.n_grid;
      break;
    case ExperimentMode::Sweep:
      j["lambda_grid"] = cfg.lambda_grid;
      j["d_values"] = cfg.sweep_d_values;
      j["q_values"] = cfg.sweep_q_values;
      break;
    case ExperimentMode::Fluid: {
      const SystemParams& p = cfg.run.params;
      j["policy"] = to_string(p.policy.kind);
      j["lambda"] = p.lambda;
      if (p.policy.d) j["d"] = *p.policy.d;
      j["t_end"] = cfg.run.t_end;
      j["dt"] = cfg.integrate.dt;
      j["v0"] = cfg.fluid_v0 ? *cfg.fluid_v0 : TailVector{};
      break;
    }
    case ExperimentMode::FixedPoint:
    case ExperimentMode::BdEq:
      // The CLI hashes a bespoke identity for the closed-form commands.
      break;
  }
  return j;
}

void to_json(nlohmann::json& j, const MeanStd& m) {
  j = nlohmann::json{{"mean", m.mean}, {"stddev", m.stddev}};
}

void to_json(nlohmann::json& j, const ReplicaComparison& r) {
  j = nlohmann::json{{"seed", r.seed},
                     {"max_abs_tail_gap", r.max_abs_tail_gap},
                     {"rho_gap", r.rho_gap}};
  if (r.tv_occupancy) j["tv_occupancy"] = *r.tv_occupancy;
  if (r.p_max_le_1) j["p_max_le_1"] = *r.p_max_le_1;
}

void to_json(nlohmann::json& j, const ComparisonReport& r) {
  j = nlohmann::json{{"params", r.params},
                     {"k_report", r.k_report},
                     {"theory_tail", r.theory_tail},
                     {"mean_tail", r.mean_tail},
                     {"replicas", r.replicas},
                     {"tail_gap_stats", r.tail_gap_stats},
                     {"rho_gap_stats", r.rho_gap_stats},
                     {"mean_tail_max_abs_gap", r.mean_tail_max_abs_gap},
                     {"mean_tail_rho_gap", r.mean_tail_rho_gap},
                     {"warnings", r.warnings},
                     {"breach", r.breach}};
  if (r.tv_stats) j["tv_stats"] = *r.tv_stats;
  if (r.p_max_stats) j["p_max_stats"] = *r.p_max_stats;
  if (r.mean_tv_occupancy) j["mean_tv_occupancy"] = *r.mean_tv_occupancy;
  if (r.mean_p_max_le_1) j["mean_p_max_le_1"] = *r.mean_p_max_le_1;
}

std::vector<RunResult> run_replicas(const RunConfig& base, int replicas, int jobs) {
  if (replicas < 1) throw std::invalid_argument("replicas must be >= 1");
  int workers = jobs > 0 ? jobs : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, replicas);

  std::vector<RunResult> results(replicas);
  std::vector<std::string> errors(replicas);
  std::atomic<int> next{0};
  auto worker = [&]() {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= replicas) return;
      RunConfig rc = base;
      rc.seed = replica_seed(base.seed, i);
      try {
        results[i] = run(rc);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  for (const std::string& err : errors) {
    if (!err.empty()) throw std::runtime_error("replica failed: " + err);
  }
  return results;
}

TailVector mean_tail(const std::vector<RunResult>& results) {
  if (results.empty()) throw std::invalid_argument("mean_tail of no results");
  size_t width = 1;
  for (const RunResult& r : results) width = std::max(width, r.time_avg_tail.size());
  std::vector<double> acc(width, 0.0);
  for (const RunResult& r : results) {
    for (size_t k = 0; k < width; ++k) acc[k] += r.time_avg_tail.entry(k);
  }
  for (double& x : acc) x /= static_cast<double>(results.size());
  acc[0] = 1.0;
  return TailVector::from_entries(std::move(acc), 1e-12);
}

double tv_distance(const std::vector<double>& a, const std::vector<double>& b) {
  const size_t width = std::max(a.size(), b.size());
  double sum = 0.0;
  for (size_t j = 0; j < width; ++j) {
    const double x = j < a.size() ? a[j] : 0.0;
    const double y = j < b.size() ? b[j] : 0.0;
    sum += std::abs(x - y);
  }
  return 0.5 * sum;
}

double fraction_max_le_1(const RunResult& r) {
  double f = 0.0;
  if (!r.max_queue_hist.empty()) f += r.max_queue_hist[0];
  if (r.max_queue_hist.size() > 1) f += r.max_queue_hist[1];
  return f;
}

namespace {

MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd ms;
  if (xs.empty()) return ms;
  double sum = 0.0;
  for (const double x : xs) sum += x;
  ms.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (const double x : xs) ss += (x - ms.mean) * (x - ms.mean);
    ms.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return ms;
}

double tail_gap(const TailVector& u, const TailVector& theory, int k_report) {
  double gap = 0.0;
  for (int k = 1; k <= k_report; ++k) {
    gap = std::max(gap, std::abs(u.entry(k) - theory.entry(k)));
  }
  return gap;
}

std::vector<double> mean_pmf(const std::vector<RunResult>& results,
                             std::vector<double> (RunResult::* field)) {
  size_t width = 0;
  for (const RunResult& r : results) width = std::max(width, (r.*field).size());
  std::vector<double> acc(width, 0.0);
  for (const RunResult& r : results) {
    const std::vector<double>& h = r.*field;
    for (size_t j = 0; j < h.size(); ++j) acc[j] += h[j];
  }
  for (double& x : acc) x /= static_cast<double>(results.size());
  return acc;
}

std::string opt_cell(const std::optional<double>& x) {
  return x ? format_double(*x) : std::string{};
}

void ensure_dir(const std::string& dir) {
  std::filesystem::create_directories(dir);
}

}  // namespace

ComparisonReport cmd_compare(const ExperimentConfig& cfg) {
  const SystemParams& params = cfg.run.params;
  validate_params(params);
  if (params.policy.kind == PolicyKind::LcqDn) {
    throw std::invalid_argument(
        "compare supports policies lcq and lcqd; lcqdn has no fixed mean-field reference");
  }
  if (params.policy.kind == PolicyKind::Lcq && cfg.run.initial_lengths) {
    throw std::invalid_argument("compare with policy lcq requires the EMPTY initial state");
  }

  ComparisonReport rep;
  rep.params = params;
  rep.k_report = cfg.k_report;

  std::optional<BirthDeathEquilibrium> bd;
  if (params.policy.kind == PolicyKind::LcqD) {
    rep.theory_tail = fixed_point(params.lambda, *params.policy.d).v_star;
  } else {
    // The LCQ mean-field drains to the empty tail from any finite start; the
    // occupancy law converges to the birth-death equilibrium.
    rep.theory_tail = TailVector{};
    bd = bd_equilibrium(params.lambda, params.q);
    const double drain_bound = 1.0 / (1.0 - params.lambda);  // K = 1 for EMPTY start
    if (cfg.run.effective_burn_in() < drain_bound) {
      rep.warnings.push_back("burn_in " + format_double(cfg.run.effective_burn_in()) +
                             " is below the fluid drain bound K/(1-lambda) = " +
                             format_double(drain_bound));
    }
  }

  const std::vector<RunResult> results = run_replicas(cfg.run, cfg.replicas, cfg.jobs);

  std::vector<double> gaps, rhos, tvs, pmaxes;
  for (const RunResult& r : results) {
    ReplicaComparison rc;
    rc.seed = r.seed;
    rc.max_abs_tail_gap = tail_gap(r.time_avg_tail, rep.theory_tail, cfg.k_report);
    rc.rho_gap = rho_distance(r.time_avg_tail, rep.theory_tail);
    gaps.push_back(rc.max_abs_tail_gap);
    rhos.push_back(rc.rho_gap);
    if (bd) {
      rc.tv_occupancy = tv_distance(r.total_occupancy_hist, bd->pi);
      rc.p_max_le_1 = fraction_max_le_1(r);
      tvs.push_back(*rc.tv_occupancy);
      pmaxes.push_back(*rc.p_max_le_1);
    }
    rep.replicas.push_back(std::move(rc));
  }

  rep.mean_tail = mean_tail(results);
  rep.tail_gap_stats = mean_std(gaps);
  rep.rho_gap_stats = mean_std(rhos);
  rep.mean_tail_max_abs_gap = tail_gap(rep.mean_tail, rep.theory_tail, cfg.k_report);
  rep.mean_tail_rho_gap = rho_distance(rep.mean_tail, rep.theory_tail);
  if (bd) {
    rep.tv_stats = mean_std(tvs);
    rep.p_max_stats = mean_std(pmaxes);
    rep.mean_tv_occupancy =
        tv_distance(mean_pmf(results, &RunResult::total_occupancy_hist), bd->pi);
    rep.mean_p_max_le_1 = mean_std(pmaxes).mean;
  }

  rep.breach = rep.mean_tail_max_abs_gap > cfg.thresholds.max_abs_tail_gap ||
               rep.mean_tail_rho_gap > cfg.thresholds.rho_gap;
  if (bd) {
    rep.breach = rep.breach || *rep.mean_tv_occupancy > cfg.thresholds.tv_occupancy ||
                 *rep.mean_p_max_le_1 < cfg.thresholds.p_max_le_1_min;
  }

  if (!cfg.output_dir.empty()) {
    ensure_dir(cfg.output_dir);
    const std::filesystem::path dir(cfg.output_dir);
    const nlohmann::json identity = experiment_identity(cfg);

    nlohmann::json report_json{{"config", identity},
                               {"config_hash", config_hash_hex(identity)},
                               {"report", rep}};
    write_text_file((dir / "compare.json").string(), report_json.dump(2) + "\n");

    CsvTable reps;
    reps.comments = artifact_header(identity, cfg.run.seed);
    reps.columns = {"replica", "seed", "max_abs_tail_gap", "rho_gap", "tv_occupancy",
                    "p_max_le_1"};
    for (size_t i = 0; i < rep.replicas.size(); ++i) {
      const ReplicaComparison& rc = rep.replicas[i];
      reps.rows.push_back({std::to_string(i), std::to_string(rc.seed),
                           format_double(rc.max_abs_tail_gap), format_double(rc.rho_gap),
                           opt_cell(rc.tv_occupancy), opt_cell(rc.p_max_le_1)});
    }
    reps.rows.push_back({"mean", "", format_double(rep.tail_gap_stats.mean),
                         format_double(rep.rho_gap_stats.mean),
                         rep.tv_stats ? format_double(rep.tv_stats->mean) : "",
                         rep.p_max_stats ? format_double(rep.p_max_stats->mean) : ""});
    reps.rows.push_back({"stddev", "", format_double(rep.tail_gap_stats.stddev),
                         format_double(rep.rho_gap_stats.stddev),
                         rep.tv_stats ? format_double(rep.tv_stats->stddev) : "",
                         rep.p_max_stats ? format_double(rep.p_max_stats->stddev) : ""});
    reps.rows.push_back({"replica_mean", "", format_double(rep.mean_tail_max_abs_gap),
                         format_double(rep.mean_tail_rho_gap),
                         opt_cell(rep.mean_tv_occupancy), opt_cell(rep.mean_p_max_le_1)});
    write_text_file((dir / "compare_replicas.csv").string(), csv_to_string(reps));

    CsvTable tails;
    tails.comments = artifact_header(identity, cfg.run.seed);
    tails.columns = {"k", "mean_u_k", "theory_k", "abs_gap"};
    const size_t width = std::max(rep.mean_tail.size(), rep.theory_tail.size());
    for (size_t k = 0; k < width; ++k) {
      tails.rows.push_back(
          {std::to_string(k), format_double(rep.mean_tail.entry(k)),
           format_double(rep.theory_tail.entry(k)),
           format_double(std::abs(rep.mean_tail.entry(k) - rep.theory_tail.entry(k)))});
    }
    write_text_file((dir / "compare_mean_tail.csv").string(), csv_to_string(tails));
  }
  return rep;
}

namespace {

std::vector<double> default_lambda_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 19; ++i) grid.push_back(0.05 * i);
  return grid;
}

std::string sweep_gnuplot_script() {
  return R"(# Plots for the delay sweep; run `gnuplot sweep.gnuplot` next to sweep.csv.
set datafile separator ','
set key left top
set xlabel 'lambda'
set terminal pngcairo size 900,600

set output 'delay_lcq_normalized.png'
set ylabel 'n x mean delay (LCQ)'
plot 'sweep.csv' using (strcol(2) eq 'lcq' && $4 == 0.3 ? $1 : NaN):5 with linespoints title 'q=0.3', \
     ''          using (strcol(2) eq 'lcq' && $4 == 0.5 ? $1 : NaN):5 with linespoints title 'q=0.5', \
     ''          using (strcol(2) eq 'lcq' && $4 == 0.8 ? $1 : NaN):5 with linespoints title 'q=0.8'

set output 'delay_lcqd.png'
set ylabel 'mean delay (LCQ(d))'
plot 'sweep.csv' using (strcol(2) eq 'lcqd' && $3 == 1 ? $1 : NaN):5 with linespoints title 'd=1', \
     ''          using (strcol(2) eq 'lcqd' && $3 == 2 ? $1 : NaN):5 with linespoints title 'd=2', \
     ''          using (strcol(2) eq 'lcqd' && $3 == 4 ? $1 : NaN):5 with linespoints title 'd=4', \
     ''          using (strcol(2) eq 'lcqd' && $3 == 8 ? $1 : NaN):5 with linespoints title 'd=8'
)";
}

}  // namespace

std::vector<SweepRow> cmd_sweep_delay(const ExperimentConfig& cfg) {
  const std::vector<double> grid =
      cfg.lambda_grid.empty() ? default_lambda_grid() : cfg.lambda_grid;
  for (const double lam : grid) {
    if (!(lam > 0.0 && lam < 1.0)) throw std::invalid_argument("lambda grid must lie in (0,1)");
  }
  for (const int d : cfg.sweep_d_values) {
    if (d < 1) throw std::invalid_argument("d >= 1 required");
  }
  for (const double q : cfg.sweep_q_values) {
    if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("q must be in (0,1]");
  }

  std::vector<SweepRow> rows;
  for (const double lam : grid) {
    for (const int d : cfg.sweep_d_values) {
      rows.push_back({lam, "lcqd", d, std::nullopt, delay_lcqd(lam, d)});
    }
  }
  for (const double lam : grid) {
    for (const double q : cfg.sweep_q_values) {
      rows.push_back({lam, "lcq", std::nullopt, q, delay_lcq_normalized(lam, q)});
    }
  }

  if (!cfg.output_dir.empty()) {
    ensure_dir(cfg.output_dir);
    const std::filesystem::path dir(cfg.output_dir);
    write_text_file((dir / "sweep.csv").string(), csv_to_string(sweep_csv_table(cfg, rows)));
    write_text_file((dir / "sweep.gnuplot").string(), sweep_gnuplot_script());
  }
  return rows;
}

CsvTable sweep_csv_table(const ExperimentConfig& cfg, const std::vector<SweepRow>& rows) {
  ExperimentConfig resolved = cfg;  // header shows the grid actually used
  if (resolved.lambda_grid.empty()) resolved.lambda_grid = default_lambda_grid();
  CsvTable t;
  t.comments = artifact_header(experiment_identity(resolved));
  t.columns = {"lambda", "policy", "d", "q", "delay"};
  for (const SweepRow& r : rows) {
    t.rows.push_back({format_double(r.lambda), r.policy,
                      r.d ? std::to_string(*r.d) : std::string{},
                      r.q ? format_double(*r.q) : std::string{}, format_double(r.delay)});
  }
  return t;
}

std::vector<ScalingRow> cmd_scaling_lcqdn(const ExperimentConfig& cfg) {
  const SystemParams& base = cfg.run.params;
  if (base.policy.kind != PolicyKind::LcqDn || !base.policy.dn_rule) {
    throw std::invalid_argument("scaling requires policy lcqdn with a dn rule");
  }
  if (cfg.n_grid.empty()) throw std::invalid_argument("n grid must be non-empty");

  std::vector<ScalingRow> rows;
  for (const int64_t n : cfg.n_grid) {
    SystemParams params = base;
    params.n = n;
    validate_params(params);
    RunConfig rc = cfg.run;
    rc.params = params;
    const std::vector<RunResult> results = run_replicas(rc, cfg.replicas, cfg.jobs);
    double occ = 0.0;
    for (const RunResult& r : results) occ += r.little_time_avg_occupancy;
    occ /= static_cast<double>(results.size());
    const int64_t d_n = resolve_dn(*base.policy.dn_rule, n);
    rows.push_back(
        {n, d_n, occ, occ * static_cast<double>(d_n) / static_cast<double>(n)});
  }

  if (!cfg.output_dir.empty()) {
    ensure_dir(cfg.output_dir);
    const std::filesystem::path dir(cfg.output_dir);
    write_text_file((dir / "scaling.csv").string(),
                    csv_to_string(scaling_csv_table(cfg, rows)));
  }
  return rows;
}

CsvTable scaling_csv_table(const ExperimentConfig& cfg, const std::vector<ScalingRow>& rows) {
  CsvTable t;
  t.comments = artifact_header(experiment_identity(cfg), cfg.run.seed);
  t.columns = {"n", "d_n", "mean_total_occupancy", "rescaled_occupancy"};
  for (const ScalingRow& r : rows) {
    t.rows.push_back({std::to_string(r.n), std::to_string(r.d_n),
                      format_double(r.mean_total_occupancy),
                      format_double(r.rescaled_occupancy)});
  }
  return t;
}

}  // namespace oslab
