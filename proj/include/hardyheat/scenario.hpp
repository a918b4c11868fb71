#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "hardyheat/evolution.hpp"
#include "hardyheat/grid.hpp"
#include "hardyheat/operator.hpp"
#include "hardyheat/specfun.hpp"

namespace hardyheat {

/// A fully resolved experiment description. See FORMATS.md for the file keys.
struct Scenario {
  std::string name;
  FractionalParams params;
  std::string c_spec;  // as written, e.g. "0.5*cstar"
  double c = 0.0;      // resolved absolute value
  Domain domain;
  std::vector<double> hs;          // grid levels, coarse to fine
  std::vector<double> k_schedule;  // empty: default ladder per grid
  std::string u0 = "ball:0.2";
  std::vector<double> times;
  bool times_in_tref = true;  // times are multiples of 1/lambda_1(L0) on hs[0]
  Scheme scheme = Scheme::expm;
  std::uint64_t seed = 0;
  std::string suite;
  PotentialRule potential = PotentialRule::lattice;
  std::filesystem::path base_dir;  // for relative csv: paths

  double c_star() const { return hardy_constant(params); }
  nlohmann::json to_json() const;
  /// FNV-1a 64 of the canonical JSON, as 16 hex digits.
  std::string hash() const;
};

/// Parses "0.5*cstar", "cstar", "1.5 * c*" or a plain number.
double resolve_strength(const nlohmann::json& value, const FractionalParams& p);

Scenario parse_scenario(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
/// Throws ConfigError naming unknown or missing keys.
Scenario load_scenario(const std::filesystem::path& path);

/// u0 string sampled on a grid: ball:r, gaussian:sigma, point, csv:path.
Eigen::VectorXd initial_datum(const Scenario& s, const Grid& grid);

/// Output times in absolute units for the scenario's first grid level.
std::vector<double> absolute_times(const Scenario& s, double t_ref);

std::string fnv1a_hex(const std::string& bytes);

}  // namespace hardyheat
