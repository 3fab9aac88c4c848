#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "oslab/equilibrium.hpp"
#include "oslab/meanfield.hpp"
#include "oslab/params.hpp"
#include "oslab/simulator.hpp"
#include "oslab/tail.hpp"

namespace oslab {

/// Shortest decimal form that round-trips to the same double (std::to_chars),
/// so emitted CSV/JSON is byte-stable across runs and platforms.
std::string format_double(double x);

uint64_t fnv1a64(std::string_view bytes);

/// 16 lowercase hex digits of the FNV-1a hash of the compact JSON dump.
std::string config_hash_hex(const nlohmann::json& config);

void to_json(nlohmann::json& j, const PolicySpec& p);
void from_json(const nlohmann::json& j, PolicySpec& p);
void to_json(nlohmann::json& j, const SystemParams& p);
void from_json(const nlohmann::json& j, SystemParams& p);
void to_json(nlohmann::json& j, const TailVector& u);
void from_json(const nlohmann::json& j, TailVector& u);
void to_json(nlohmann::json& j, const CountTail& c);
void from_json(const nlohmann::json& j, CountTail& c);
void to_json(nlohmann::json& j, const RunConfig& c);
void from_json(const nlohmann::json& j, RunConfig& c);
void to_json(nlohmann::json& j, const EventCounts& c);
void to_json(nlohmann::json& j, const RunResult& r);
void to_json(nlohmann::json& j, const FixedPoint& fp);
void to_json(nlohmann::json& j, const BirthDeathEquilibrium& bd);
void to_json(nlohmann::json& j, const FluidTrajectory& traj);

/// One CSV artifact: '# ...' comment lines, a column-name row, then data
/// rows of preformatted cells.  Comma delimiter, '.' decimal, LF endings.
struct CsvTable {
  std::vector<std::string> comments;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

std::string csv_to_string(const CsvTable& table);
void write_csv(std::ostream& os, const CsvTable& table);
void write_text_file(const std::string& path, const std::string& contents);
std::string read_text_file(const std::string& path);

/// Header comments carried by every artifact: the config hash, the seed when
/// the artifact came from simulation, and the full compact config JSON.
std::vector<std::string> artifact_header(const nlohmann::json& config,
                                         std::optional<uint64_t> seed = std::nullopt);

CsvTable tail_csv(const TailVector& u);                // k, time_avg_u_k
CsvTable trajectory_csv(const FluidTrajectory& traj);  // t, v_1..v_Kmax
CsvTable fixed_point_csv(const FixedPoint& fp);        // k, v_star_k, p_k
CsvTable bd_csv(const BirthDeathEquilibrium& bd);      // j, pi_j

}  // namespace oslab
