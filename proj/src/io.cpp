// Serialization: JSON hooks for the domain types, byte-stable number
// formatting, config hashing, and the CSV artifact layer shared by the CLI
// subcommands.

#include "oslab/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace oslab {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

uint64_t fnv1a64(std::string_view bytes) {
  uint64_t h = 0xCBF29CE484222325ull;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ull;
  }
  return h;
}

std::string config_hash_hex(const nlohmann::json& config) {
  const uint64_t h = fnv1a64(config.dump());
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

void to_json(nlohmann::json& j, const PolicySpec& p) {
  j = nlohmann::json{{"kind", to_string(p.kind)}};
  if (p.d) j["d"] = *p.d;
  if (p.dn_rule) j["dn_exp"] = p.dn_rule->exponent;
  if (p.selection_mode) j["mode"] = to_string(*p.selection_mode);
}

void from_json(const nlohmann::json& j, PolicySpec& p) {
  p = PolicySpec{};
  p.kind = policy_kind_from_string(j.at("kind").get<std::string>());
  if (j.contains("d")) p.d = j.at("d").get<int>();
  if (j.contains("dn_exp")) p.dn_rule = DnRule{j.at("dn_exp").get<double>()};
  if (j.contains("mode")) {
    p.selection_mode = selection_mode_from_string(j.at("mode").get<std::string>());
  }
}

void to_json(nlohmann::json& j, const SystemParams& p) {
  j = nlohmann::json{{"n", p.n}, {"lambda", p.lambda}, {"q", p.q}, {"policy", p.policy}};
}

void from_json(const nlohmann::json& j, SystemParams& p) {
  p = SystemParams{};
  p.n = j.at("n").get<int64_t>();
  p.lambda = j.at("lambda").get<double>();
  p.q = j.at("q").get<double>();
  if (j.contains("policy")) p.policy = j.at("policy").get<PolicySpec>();
}

void to_json(nlohmann::json& j, const TailVector& u) { j = u.entries(); }

void from_json(const nlohmann::json& j, TailVector& u) {
  u = TailVector::from_entries(j.get<std::vector<double>>(), 1e-12);
}

void to_json(nlohmann::json& j, const CountTail& c) {
  j = nlohmann::json{{"m", c.m}, {"t", c.time}};
}

void from_json(const nlohmann::json& j, CountTail& c) {
  c.m = j.at("m").get<std::vector<int64_t>>();
  c.time = j.at("t").get<double>();
}

void to_json(nlohmann::json& j, const RunConfig& c) {
  j = nlohmann::json{{"params", c.params},
                     {"t_end", c.t_end},
                     {"burn_in", c.burn_in},
                     {"seed", c.seed},
                     {"sample_interval", c.sample_interval}};
  if (c.initial_lengths) j["initial_lengths"] = *c.initial_lengths;
}

void from_json(const nlohmann::json& j, RunConfig& c) {
  c = RunConfig{};
  c.params = j.at("params").get<SystemParams>();
  if (j.contains("t_end")) c.t_end = j.at("t_end").get<double>();
  if (j.contains("burn_in")) c.burn_in = j.at("burn_in").get<double>();
  if (j.contains("seed")) c.seed = j.at("seed").get<uint64_t>();
  if (j.contains("sample_interval")) c.sample_interval = j.at("sample_interval").get<double>();
  if (j.contains("initial_lengths") && !j.at("initial_lengths").is_null()) {
    c.initial_lengths = j.at("initial_lengths").get<std::vector<int32_t>>();
  }
}

void to_json(nlohmann::json& j, const EventCounts& c) {
  j = nlohmann::json{{"arrivals", c.arrivals}, {"services", c.services}, {"idles", c.idles}};
}

void to_json(nlohmann::json& j, const RunResult& r) {
  j = nlohmann::json{
      {"time_avg_tail", r.time_avg_tail},
      {"total_occupancy_hist", r.total_occupancy_hist},
      {"max_queue_hist", r.max_queue_hist},
      {"mean_sojourn", r.mean_sojourn},
      {"sojourn_count", r.sojourn_count},
      {"little_check",
       {{"arrival_rate_x_sojourn", r.little_arrival_rate_x_sojourn},
        {"time_avg_occupancy", r.little_time_avg_occupancy},
        {"within_5pct", r.little_within_5pct}}},
      {"event_counts", r.event_counts},
      {"seed", r.seed}};
}

void to_json(nlohmann::json& j, const FixedPoint& fp) {
  j = nlohmann::json{
      {"lambda", fp.lambda}, {"d", fp.d}, {"v_star", fp.v_star}, {"p", fp.p}};
}

void to_json(nlohmann::json& j, const BirthDeathEquilibrium& bd) {
  j = nlohmann::json{{"lambda", bd.lambda},
                     {"q", bd.q},
                     {"pi", bd.pi},
                     {"mean_occupancy", bd.mean_occupancy},
                     {"truncation_mass", bd.truncation_mass}};
}

void to_json(nlohmann::json& j, const FluidTrajectory& traj) {
  j = nlohmann::json{{"policy", to_string(traj.policy)},
                     {"times", traj.times},
                     {"states", traj.states},
                     {"monotonicity_repairs", traj.monotonicity_repairs}};
}

std::string csv_to_string(const CsvTable& table) {
  std::ostringstream os;
  write_csv(os, table);
  return os.str();
}

void write_csv(std::ostream& os, const CsvTable& table) {
  for (const std::string& line : table.comments) os << "# " << line << "\n";
  for (size_t i = 0; i < table.columns.size(); ++i) {
    if (i > 0) os << ",";
    os << table.columns[i];
  }
  os << "\n";
  for (const auto& row : table.rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i > 0) os << ",";
      os << row[i];
    }
    os << "\n";
  }
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << contents;
  if (!f) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::string> artifact_header(const nlohmann::json& config,
                                         std::optional<uint64_t> seed) {
  std::vector<std::string> lines;
  lines.push_back("config_hash=" + config_hash_hex(config));
  if (seed) lines.push_back("seed=" + std::to_string(*seed));
  lines.push_back("config=" + config.dump());
  return lines;
}

CsvTable tail_csv(const TailVector& u) {
  CsvTable t;
  t.columns = {"k", "time_avg_u_k"};
  for (size_t k = 0; k < u.size(); ++k) {
    t.rows.push_back({std::to_string(k), format_double(u.entry(k))});
  }
  return t;
}

CsvTable trajectory_csv(const FluidTrajectory& traj) {
  CsvTable t;
  size_t width = 1;
  for (const TailVector& v : traj.states) width = std::max(width, v.size());
  t.columns.push_back("t");
  for (size_t k = 1; k < width; ++k) t.columns.push_back("v_" + std::to_string(k));
  for (size_t i = 0; i < traj.times.size(); ++i) {
    std::vector<std::string> row;
    row.push_back(format_double(traj.times[i]));
    for (size_t k = 1; k < width; ++k) {
      row.push_back(format_double(traj.states[i].entry(k)));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable fixed_point_csv(const FixedPoint& fp) {
  CsvTable t;
  t.columns = {"k", "v_star_k", "p_k"};
  for (size_t k = 0; k < fp.v_star.size(); ++k) {
    const double p_k = k < fp.p.size() ? fp.p[k] : 0.0;
    t.rows.push_back({std::to_string(k), format_double(fp.v_star.entry(k)), format_double(p_k)});
  }
  return t;
}

CsvTable bd_csv(const BirthDeathEquilibrium& bd) {
  CsvTable t;
  t.columns = {"j", "pi_j"};
  for (size_t j = 0; j < bd.pi.size(); ++j) {
    t.rows.push_back({std::to_string(j), format_double(bd.pi[j])});
  }
  return t;
}

}  // namespace oslab
