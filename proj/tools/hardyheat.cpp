// Command-line front end: constants, assemble, evolve, kernel, verify, sweep.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "hardyheat/errors.hpp"
#include "hardyheat/estimators.hpp"
#include "hardyheat/evolution.hpp"
#include "hardyheat/harness.hpp"
#include "hardyheat/scenario.hpp"

using namespace hardyheat;
using nlohmann::json;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      out.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw ConfigError("cannot read number '" + cell + "' in list '" + text + "'");
    }
  }
  return out;
}

json strength_value(const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  return text;
}

struct Globals {
  std::string out;
  bool force = false;
  int threads = 0;
  long long seed = -1;
};

void apply_globals(const Globals& g, Scenario& s) {
  if (g.seed >= 0) s.seed = static_cast<std::uint64_t>(g.seed);
}

std::filesystem::path root_of(const Globals& g) {
  return g.out.empty() ? default_output_root() : std::filesystem::path(g.out);
}

int cmd_constants(int d, double alpha, const std::string& c_text) {
  const FractionalParams p{d, alpha};
  if (!p.valid()) throw ConfigError("need d in {1,2,3} and 0 < alpha < min(2,d)");
  const auto hc = hardy_constants(p);
  json j{{"d", d}, {"alpha", alpha}, {"intensity", hc.intensity}, {"c_star", hc.c_star},
         {"beta_star", p.beta_star()}};
  if (!c_text.empty()) {
    const double c = resolve_strength(strength_value(c_text), p);
    j["c"] = c;
    if (c > 0.0 && c <= hc.c_star) {
      j["beta"] = beta_of_c(c, p);
    } else {
      j["beta"] = nullptr;
    }
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_assemble(int d, double alpha, const std::string& c_text, double k, const std::string& domain_text,
                 double h, const std::string& potential, const std::string& out) {
  const FractionalParams p{d, alpha};
  if (!p.valid()) throw ConfigError("need d in {1,2,3} and 0 < alpha < min(2,d)");
  const auto dom = parse_list(domain_text);
  if (dom.size() != 2 * static_cast<std::size_t>(d)) throw ConfigError("--domain needs 2*d numbers");
  Domain domain;
  for (std::size_t i = 0; i < dom.size(); i += 2) domain.axes.push_back({dom[i], dom[i + 1]});
  const double c = resolve_strength(strength_value(c_text), p);
  const auto grid = build_grid(domain, h);
  const auto op = assemble_operator(grid, p, c, k > 0.0 ? k : INFINITY, potential_rule_from_string(potential));
  const std::filesystem::path csv = out;
  const auto checksum = write_triples_csv(csv, op.hamiltonian());
  json header;
  header["format"] = "hardyheat-operator-1";
  header["matrix"] = "H = L0 - diag(min(V, k))";
  header["grid"] = {{"dim", d}, {"h", h}, {"domain", dom}, {"nodes", grid.size()},
                    {"cells", grid.cells_per_axis()}};
  header["constants"] = {{"intensity", intensity_constant(p)}, {"c_star", hardy_constant(p)}};
  header["c"] = c;
  header["k"] = k > 0.0 ? json(k) : json("inf");
  header["potential"] = potential;
  header["csv"] = csv.filename().string();
  header["checksum_fnv1a64"] = checksum;
  write_json(csv.string() + ".json", header);
  std::cout << csv.string() << "\n";
  return 0;
}

int cmd_evolve(const Globals& g, const std::string& scenario_path, const std::string& times_text,
               const std::string& scheme_text, const std::string& out_dir) {
  auto s = load_scenario(scenario_path);
  apply_globals(g, s);
  if (!times_text.empty()) s.times = parse_list(times_text);
  if (!scheme_text.empty()) s.scheme = scheme_from_string(scheme_text);
  if (s.times.empty()) throw ConfigError("no times given (scenario 'times' or --times)");
  const std::filesystem::path dir =
      out_dir.empty() ? root_of(g) / "trajectories" / s.hash() : std::filesystem::path(out_dir);
  std::filesystem::create_directories(dir);
  json report;
  report["scenario"] = s.to_json();
  report["levels"] = json::array();
  double t_ref = 0.0;
  for (std::size_t l = 0; l < s.hs.size(); ++l) {
    const auto grid = build_grid(s.domain, s.hs[l]);
    const auto op = assemble_operator(grid, s.params, s.c, INFINITY, s.potential);
    if (l == 0) t_ref = reference_time(s.c == 0.0 ? op : assemble_operator(grid, s.params, 0.0));
    const auto times = absolute_times(s, t_ref);
    const auto u0 = initial_datum(s, grid);
    const auto ms = minimal_solution(op, u0, times, s.k_schedule, s.scheme);
    for (std::size_t j = 0; j < times.size(); ++j) {
      write_state_csv(dir / ("u_h" + std::to_string(l) + "_t" + std::to_string(j) + ".csv"), grid,
                      ms.solution.states[j]);
    }
    report["levels"].push_back({{"h", s.hs[l]},
                                {"times", times},
                                {"k_schedule", ms.ks},
                                {"mode", ms.mode == MinimalSolution::Mode::convergence ? "convergence" : "divergence"},
                                {"worst_monotonicity", ms.worst_monotonicity},
                                {"monotonicity_tolerance", ms.monotonicity_tolerance},
                                {"last_increment", ms.last_increment},
                                {"converged", ms.converged},
                                {"time_error", ms.solution.time_error}});
  }
  report["t_ref"] = t_ref;
  write_json(dir / "report.json", report);
  std::cout << (dir / "report.json").string() << "\n";
  return 0;
}

int cmd_kernel(const Globals& g, const std::string& scenario_path, double t, std::size_t level,
               const std::string& out) {
  auto s = load_scenario(scenario_path);
  apply_globals(g, s);
  if (level >= s.hs.size()) throw ConfigError("--level beyond the scenario's grid levels");
  const auto first = build_grid(s.domain, s.hs.front());
  const double t_ref = reference_time(assemble_operator(first, s.params, 0.0));
  const double t_abs = s.times_in_tref ? t * t_ref : t;
  const auto grid = build_grid(s.domain, s.hs[level]);
  const auto op = assemble_operator(grid, s.params, s.c, INFINITY, s.potential);
  const auto K = heat_kernel(op, t_abs);
  const std::filesystem::path path =
      out.empty() ? root_of(g) / "kernels" / (s.hash() + "-h" + std::to_string(level) + "-t" + format_number(t) + ".csv")
                  : std::filesystem::path(out);
  const auto checksum = write_triples_csv(path, K.entries);
  write_json(path.string() + ".json", {{"format", "hardyheat-kernel-1"},
                                       {"t", t_abs},
                                       {"t_ref", t_ref},
                                       {"c", s.c},
                                       {"h", s.hs[level]},
                                       {"nodes", grid.size()},
                                       {"checksum_fnv1a64", checksum}});
  std::cout << path.string() << "\n";
  return 0;
}

int cmd_verify(const Globals& g, const std::string& suite, const std::string& scenario_path, const std::string& out) {
  auto s = load_scenario(scenario_path);
  apply_globals(g, s);
  if (suite == "sharp" && s.c > s.c_star() * (1 + 1e-14)) throw ConfigError("suite sharp requires c <= c*");
  RunStore store(root_of(g));
  const auto path = run_suite(store, s, suite, g.force);
  std::ifstream in(path);
  const json rep = json::parse(in);
  if (!out.empty()) write_json(out, rep);
  for (const auto& c : rep["checks"]) {
    std::cout << (c["pass"].get<bool>() ? "PASS " : "FAIL ") << c["name"].get<std::string>() << "  measured="
              << c["measured"] << "\n";
  }
  std::cout << (out.empty() ? path.string() : out) << "\n";
  return rep.value("pass", false) ? 0 : kExitFail;
}

int cmd_sweep(const Globals& g, const std::string& scenario_path, const std::string& factors_text,
              const std::string& suite) {
  auto s = load_scenario(scenario_path);
  apply_globals(g, s);
  RunStore store(root_of(g));
  const int threads = g.threads > 0 ? g.threads : 1;
  const auto res = sweep(store, s, parse_list(factors_text), suite, threads, g.force);
  bool ok = true;
  for (std::size_t i = 0; i < res.reports.size(); ++i) {
    std::cout << (res.passed[i] ? "PASS " : "FAIL ") << (res.cached[i] ? "(cached) " : "") << res.reports[i].string()
              << "\n";
    ok = ok && res.passed[i];
  }
  return ok ? 0 : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dirichlet fractional Laplacian with Hardy potential: assembly, heat flow and verification"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--out", g.out, "Output root directory (default $HARDYHEAT_OUT or ./hardyheat-runs)");
  app.add_flag("--force", g.force, "Recompute even when a cached report exists");
  app.add_option("--threads", g.threads, "Worker threads (OpenMP and sweep workers)")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "Override the scenario seed")->check(CLI::NonNegativeNumber);

  int d = 1;
  double alpha = 0.5, k = 0.0, h = 0.0, t = 0.0;
  std::string c_text, domain_text, potential = "lattice", out, scenario, times_text, scheme_text, suite = "all",
                                   factors_text;
  std::size_t level = 0;

  auto* constants = app.add_subcommand("constants", "Print A(d,alpha), c*, beta* and beta(c) as JSON");
  constants->add_option("--d", d)->required();
  constants->add_option("--alpha", alpha)->required();
  constants->add_option("--c", c_text, "Number or F*cstar");

  auto* assemble = app.add_subcommand("assemble", "Write H as CSV triples plus a JSON header");
  assemble->set_help_flag("--help", "Print this help message and exit");  // frees --h for the spacing
  assemble->add_option("--d", d)->required();
  assemble->add_option("--alpha", alpha)->required();
  assemble->add_option("--c", c_text, "Number or F*cstar")->default_val("0");
  assemble->add_option("--k", k, "Truncation level (omit for none)");
  assemble->add_option("--domain", domain_text, "lo,hi[,lo2,hi2]")->required();
  assemble->add_option("--h", h)->required();
  assemble->add_option("--potential", potential, "lattice or point");
  assemble->add_option("--out", out, "CSV file")->required();

  auto* evolve_cmd = app.add_subcommand("evolve", "Minimal solution per grid level: CSV states and a JSON report");
  evolve_cmd->add_option("--scenario", scenario)->required();
  evolve_cmd->add_option("--times", times_text, "Comma separated, in the scenario's time unit");
  evolve_cmd->add_option("--scheme", scheme_text, "expm, crank-nicolson or implicit-euler");
  evolve_cmd->add_option("--out", out, "Output directory");

  auto* kernel = app.add_subcommand("kernel", "Write the heat kernel at time t as CSV triples");
  kernel->add_option("--scenario", scenario)->required();
  kernel->add_option("--t", t, "Time in the scenario's time unit")->required();
  kernel->add_option("--level", level, "Grid level index");
  kernel->add_option("--out", out, "CSV file");

  auto* verify = app.add_subcommand("verify", "Run a verification suite and write the report JSON");
  verify->add_option("--suite", suite)->check(CLI::IsMember(suite_names()));
  verify->add_option("--scenario", scenario)->required();
  verify->add_option("--out", out, "Copy of the report");

  auto* sweep_cmd = app.add_subcommand("sweep", "Run a suite for several c = F*c* in parallel");
  sweep_cmd->add_option("--scenario", scenario)->required();
  sweep_cmd->add_option("--c-factors", factors_text, "Comma separated F values")->required();
  sweep_cmd->add_option("--suite", suite)->check(CLI::IsMember(suite_names()));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version requests exit 0; anything else is a usage error.
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

#ifdef _OPENMP
  if (g.threads > 0) omp_set_num_threads(g.threads);
#endif

  try {
    if (*constants) return cmd_constants(d, alpha, c_text);
    if (*assemble) return cmd_assemble(d, alpha, c_text, k, domain_text, h, potential, out);
    if (*evolve_cmd) return cmd_evolve(g, scenario, times_text, scheme_text, out);
    if (*kernel) return cmd_kernel(g, scenario, t, level, out);
    if (*verify) return cmd_verify(g, suite, scenario, out);
    if (*sweep_cmd) return cmd_sweep(g, scenario, factors_text, suite);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParameterDomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const OutOfRangeError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return kExitFail;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
  return 0;
}
