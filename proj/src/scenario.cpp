#include "hardyheat/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "hardyheat/errors.hpp"

namespace hardyheat {

namespace {

using nlohmann::json;

const std::set<std::string> kKnownKeys = {"name", "d",      "alpha", "c",    "domain",    "h",
                                          "k_schedule", "u0", "times", "time_unit", "scheme",
                                          "seed", "suite",  "potential"};
const std::vector<std::string> kRequired = {"d", "alpha", "c", "domain", "h"};

std::vector<double> number_list(const json& v, const std::string& key) {
  std::vector<double> out;
  if (v.is_number()) {
    out.push_back(v.get<double>());
  } else if (v.is_array()) {
    for (const auto& x : v) {
      if (!x.is_number()) throw ConfigError("key '" + key + "' must hold numbers");
      out.push_back(x.get<double>());
    }
  } else {
    throw ConfigError("key '" + key + "' must be a number or an array of numbers");
  }
  return out;
}

std::string trim(std::string s) {
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char ch) { return std::isspace(ch); }), s.end());
  return s;
}

}  // namespace

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

double resolve_strength(const json& value, const FractionalParams& p) {
  if (value.is_number()) {
    const double c = value.get<double>();
    if (c < 0.0) throw ConfigError("c must be nonnegative");
    return c;
  }
  if (!value.is_string()) throw ConfigError("c must be a number or a string like \"0.5*cstar\"");
  const std::string s = trim(value.get<std::string>());
  static const std::regex pattern(R"(^(?:([0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\*)?(?:cstar|c\*)$)");
  std::smatch m;
  if (!std::regex_match(s, m, pattern)) {
    throw ConfigError("cannot read c = \"" + s + "\"; expected a number, \"cstar\" or \"F*cstar\"");
  }
  const double factor = m[1].matched ? std::stod(m[1].str()) : 1.0;
  return factor * hardy_constant(p);
}

json Scenario::to_json() const {
  json j;
  j["name"] = name;
  j["d"] = params.d;
  j["alpha"] = params.alpha;
  j["c"] = c;
  j["c_spec"] = c_spec;
  std::vector<double> dom;
  for (const auto& ax : domain.axes) {
    dom.push_back(ax.lo);
    dom.push_back(ax.hi);
  }
  j["domain"] = dom;
  j["h"] = hs;
  j["k_schedule"] = k_schedule;
  j["u0"] = u0;
  j["times"] = times;
  j["time_unit"] = times_in_tref ? "tref" : "absolute";
  j["scheme"] = to_string(scheme);
  j["seed"] = seed;
  j["suite"] = suite;
  j["potential"] = to_string(potential);
  return j;
}

std::string Scenario::hash() const {
  auto j = to_json();
  j.erase("name");
  j.erase("suite");
  return fnv1a_hex(j.dump());
}

Scenario parse_scenario(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("scenario must be a JSON object");
  std::vector<std::string> unknown;
  for (const auto& [key, _] : j.items()) {
    if (!kKnownKeys.count(key)) unknown.push_back(key);
  }
  if (!unknown.empty()) {
    std::string msg = "unknown scenario keys:";
    for (const auto& k : unknown) msg += " " + k;
    throw ConfigError(msg);
  }
  std::vector<std::string> missing;
  for (const auto& k : kRequired) {
    if (!j.contains(k)) missing.push_back(k);
  }
  if (!missing.empty()) {
    std::string msg = "missing scenario keys:";
    for (const auto& k : missing) msg += " " + k;
    throw ConfigError(msg);
  }

  Scenario s;
  s.base_dir = base_dir;
  s.name = j.value("name", "");
  if (!j["d"].is_number_integer()) throw ConfigError("key 'd' must be an integer");
  if (!j["alpha"].is_number()) throw ConfigError("key 'alpha' must be a number");
  s.params = {j["d"].get<int>(), j["alpha"].get<double>()};
  if (!s.params.valid()) {
    throw ConfigError("need d in {1,2,3} and 0 < alpha < min(2,d)");
  }
  s.c_spec = j["c"].is_string() ? j["c"].get<std::string>() : j["c"].dump();
  s.c = resolve_strength(j["c"], s.params);

  const auto dom = number_list(j["domain"], "domain");
  if (dom.size() != 2 * static_cast<std::size_t>(s.params.d)) {
    throw ConfigError("domain needs 2*d numbers [lo, hi, ...], got " + std::to_string(dom.size()));
  }
  for (std::size_t k = 0; k < dom.size(); k += 2) {
    if (!(dom[k] < 0.0 && dom[k + 1] > 0.0)) throw ConfigError("the domain must contain 0 in its interior");
    s.domain.axes.push_back({dom[k], dom[k + 1]});
  }
  s.hs = number_list(j["h"], "h");
  if (s.hs.empty()) throw ConfigError("h must list at least one spacing");
  for (double h : s.hs) build_grid(s.domain, h);  // validates every level

  if (j.contains("k_schedule") && !(j["k_schedule"].is_string() && j["k_schedule"] == "default")) {
    s.k_schedule = number_list(j["k_schedule"], "k_schedule");
    for (std::size_t i = 0; i < s.k_schedule.size(); ++i) {
      if (!(s.k_schedule[i] > 0.0) || (i && !(s.k_schedule[i] > s.k_schedule[i - 1]))) {
        throw ConfigError("k_schedule must be positive and strictly increasing");
      }
    }
  }
  if (j.contains("u0")) {
    if (!j["u0"].is_string()) throw ConfigError("u0 must be a string");
    s.u0 = j["u0"].get<std::string>();
  }
  if (j.contains("times")) {
    s.times = number_list(j["times"], "times");
    for (std::size_t i = 0; i < s.times.size(); ++i) {
      if (!(s.times[i] > 0.0) || (i && !(s.times[i] > s.times[i - 1]))) {
        throw ConfigError("times must be positive and strictly increasing");
      }
    }
  }
  if (j.contains("time_unit")) {
    const auto u = j["time_unit"].get<std::string>();
    if (u != "tref" && u != "absolute") throw ConfigError("time_unit must be \"tref\" or \"absolute\"");
    s.times_in_tref = u == "tref";
  }
  if (j.contains("scheme")) s.scheme = scheme_from_string(j["scheme"].get<std::string>());
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer()) throw ConfigError("seed must be an integer");
    s.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("potential")) s.potential = potential_rule_from_string(j["potential"].get<std::string>());
  if (j.contains("suite")) {
    s.suite = j["suite"].get<std::string>();
    if (s.suite == "sharp" && s.c > s.c_star() * (1.0 + 1e-14)) {
      throw ConfigError("suite \"sharp\" requires c <= c* (got c = " + s.c_spec + ")");
    }
  }
  initial_datum(s, build_grid(s.domain, s.hs.front()));  // validates u0
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("scenario " + path.string() + " is not valid JSON: " + e.what());
  }
  auto s = parse_scenario(j, path.parent_path());
  if (s.name.empty()) s.name = path.stem().string();
  return s;
}

Eigen::VectorXd initial_datum(const Scenario& s, const Grid& grid) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  const auto colon = s.u0.find(':');
  const std::string kind = s.u0.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : s.u0.substr(colon + 1);
  auto number = [&]() {
    try {
      std::size_t used = 0;
      const double v = std::stod(arg, &used);
      if (used != arg.size() || !(v > 0.0)) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("u0 \"" + s.u0 + "\" needs a positive number after ':'");
    }
  };
  if (kind == "ball") {
    const double r = number();
    for (Eigen::Index i = 0; i < n; ++i) u(i) = grid.radius(static_cast<std::size_t>(i)) <= r ? 1.0 : 0.0;
    if (u.sum() == 0.0) throw ConfigError("u0 ball contains no grid node");
  } else if (kind == "gaussian") {
    const double sigma = number();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double r = grid.radius(static_cast<std::size_t>(i));
      u(i) = std::exp(-0.5 * r * r / (sigma * sigma));
    }
  } else if (kind == "point") {
    u(static_cast<Eigen::Index>(grid.nearest_to_origin())) = 1.0 / grid.cell_volume();
  } else if (kind == "csv") {
    std::filesystem::path p = arg;
    if (p.is_relative() && !s.base_dir.empty()) p = s.base_dir / p;
    std::ifstream in(p);
    if (!in) throw ConfigError("cannot open u0 csv " + p.string());
    std::string line;
    std::getline(in, line);  // header
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::vector<double> row;
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
      if (static_cast<int>(row.size()) != grid.dim() + 1) {
        throw ConfigError("u0 csv rows need " + std::to_string(grid.dim() + 1) + " columns");
      }
      rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ConfigError("u0 csv has no data rows");
    // Piecewise constant: each node takes the value of the nearest sample.
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto x = grid.node(static_cast<std::size_t>(i));
      double best = INFINITY;
      for (const auto& row : rows) {
        double d2 = 0.0;
        for (int k = 0; k < grid.dim(); ++k) d2 += (row[static_cast<std::size_t>(k)] - x[static_cast<std::size_t>(k)]) * (row[static_cast<std::size_t>(k)] - x[static_cast<std::size_t>(k)]);
        if (d2 < best) {
          best = d2;
          u(i) = row.back();
        }
      }
    }
    if (u.minCoeff() < 0.0) throw ConfigError("u0 csv values must be nonnegative");
  } else {
    throw ConfigError("unknown u0 \"" + s.u0 + "\" (expected ball:r, gaussian:sigma, point or csv:path)");
  }
  return u;
}

std::vector<double> absolute_times(const Scenario& s, double t_ref) {
  std::vector<double> out = s.times;
  if (s.times_in_tref) {
    for (double& t : out) t *= t_ref;
  }
  return out;
}

}  // namespace hardyheat
