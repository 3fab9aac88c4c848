#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "oslab/equilibrium.hpp"
#include "oslab/io.hpp"
#include "oslab/meanfield.hpp"
#include "oslab/params.hpp"
#include "oslab/simulator.hpp"
#include "oslab/tail.hpp"

namespace oslab {

enum class ExperimentMode { Simulate, Fluid, FixedPoint, BdEq, Compare, Sweep, Scaling };

std::string to_string(ExperimentMode mode);

// Pass/fail gates for COMPARE, applied to the replica-mean metrics.
struct AssertThresholds {
  double max_abs_tail_gap = 0.01;
  double rho_gap = 0.01;
  double tv_occupancy = 0.05;
  double p_max_le_1_min = 0.99;
};

struct ExperimentConfig {
  ExperimentMode mode = ExperimentMode::Compare;
  RunConfig run;  // carries SystemParams plus horizon/seed/sampling
  int replicas = 1;
  int jobs = 0;  // replica worker pool size; 0 = host parallelism
  int k_report = 10;
  AssertThresholds thresholds;
  bool assert_thresholds = false;
  std::string output_dir;  // empty: compute only, write nothing

  std::vector<double> lambda_grid;                 // sweep; empty = 0.05..0.95 step 0.05
  std::vector<int> sweep_d_values = {1, 2, 4, 8};  // sweep, LCQ(d) family
  std::vector<double> sweep_q_values = {0.3, 0.5, 0.8};  // sweep, LCQ family
  std::vector<int64_t> n_grid = {100, 1000, 10000};      // scaling
  std::optional<TailVector> fluid_v0;                    // fluid; default (1, 0)
  IntegrateOptions integrate;
};

// The portion of the config that identifies the experiment: everything except
// output_dir and jobs, which affect where/how fast but not what.  Hashed into
// every artifact header.
nlohmann::json experiment_identity(const ExperimentConfig& cfg);

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;  // sample std; 0 when fewer than 2 values
};

struct ReplicaComparison {
  uint64_t seed = 0;
  double max_abs_tail_gap = 0.0;  // max over 1 <= k <= k_report
  double rho_gap = 0.0;
  std::optional<double> tv_occupancy;  // LCQ only
  std::optional<double> p_max_le_1;    // LCQ only
};

struct ComparisonReport {
  SystemParams params;
  int k_report = 10;
  TailVector theory_tail;  // v* for LCQ(d); the drained tail for LCQ
  TailVector mean_tail;    // replica mean of time_avg_tail
  std::vector<ReplicaComparison> replicas;
  MeanStd tail_gap_stats;  // across replicas
  MeanStd rho_gap_stats;
  std::optional<MeanStd> tv_stats;
  std::optional<MeanStd> p_max_stats;
  // Replica-mean metrics (the acceptance quantities): gaps of mean_tail
  // against theory, TV of the averaged pmf against pi, mean of p_max.
  double mean_tail_max_abs_gap = 0.0;
  double mean_tail_rho_gap = 0.0;
  std::optional<double> mean_tv_occupancy;
  std::optional<double> mean_p_max_le_1;
  std::vector<std::string> warnings;
  bool breach = false;  // some replica-mean metric violates the thresholds
};

void to_json(nlohmann::json& j, const MeanStd& m);
void to_json(nlohmann::json& j, const ReplicaComparison& r);
void to_json(nlohmann::json& j, const ComparisonReport& r);

// Runs `replicas` independent simulations of `base` on a worker pool of
// `jobs` threads; replica i uses seed base.seed ^ splitmix64(i), so results
// are independent of scheduling order.  Worker exceptions are rethrown after
// all replicas finish.
std::vector<RunResult> run_replicas(const RunConfig& base, int replicas, int jobs);

// Componentwise average of the replica tails over the union support.
TailVector mean_tail(const std::vector<RunResult>& results);

// Total-variation distance between two pmfs over the union support.
double tv_distance(const std::vector<double>& a, const std::vector<double>& b);

// Time fraction with max queue length <= 1.
double fraction_max_le_1(const RunResult& r);

// Simulates replicas, computes the theory object (v* or the birth-death pi),
// and reports the gaps.  LCQ comparisons require the EMPTY initial state;
// LCQ(d_n) has no mean-field reference and is rejected.  When output_dir is
// set, writes compare.json, compare_replicas.csv, compare_mean_tail.csv.
ComparisonReport cmd_compare(const ExperimentConfig& cfg);

struct SweepRow {
  double lambda = 0.0;
  std::string policy;       // "lcqd" or "lcq"
  std::optional<int> d;     // LCQ(d) rows
  std::optional<double> q;  // LCQ rows
  double delay = 0.0;       // delay_lcqd or delay_lcq_normalized
};

// Evaluates the asymptotic delay formulas over the (lambda, d) and
// (lambda, q) grids.  When output_dir is set, writes sweep.csv and a
// companion sweep.gnuplot plotting script.
std::vector<SweepRow> cmd_sweep_delay(const ExperimentConfig& cfg);

struct ScalingRow {
  int64_t n = 0;
  int64_t d_n = 0;
  double mean_total_occupancy = 0.0;  // replica mean of time-avg total packets
  double rescaled_occupancy = 0.0;    // x d_n / n
};

// Simulates LCQ(d_n) at each n in the grid and reports total occupancy
// rescaled by d_n/n.  When output_dir is set, writes scaling.csv.
std::vector<ScalingRow> cmd_scaling_lcqdn(const ExperimentConfig& cfg);

// The exact tables the commands write, exposed so callers can render the
// same bytes elsewhere (e.g. to stdout).
CsvTable sweep_csv_table(const ExperimentConfig& cfg, const std::vector<SweepRow>& rows);
CsvTable scaling_csv_table(const ExperimentConfig& cfg, const std::vector<ScalingRow>& rows);

}  // namespace oslab
