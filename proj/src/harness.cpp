#include "hardyheat/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "hardyheat/errors.hpp"
#include "hardyheat/estimators.hpp"
#include "hardyheat/forms.hpp"

namespace hardyheat {

namespace {

using nlohmann::json;

int current_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

std::string level_tag(std::size_t level) { return "[h" + std::to_string(level) + "]"; }

std::string time_tag(double t_unit) {
  std::ostringstream os;
  os << "[t=" << t_unit << "]";
  return os.str();
}

Check upper_check(std::string name, double measured, double bound) {
  return {std::move(name), measured, bound, 0.0, measured <= bound};
}

Check lower_check(std::string name, double measured, double bound) {
  return {std::move(name), measured, bound, 0.0, measured > bound};
}

Check near_check(std::string name, double measured, double expected, double tol) {
  return {std::move(name), measured, expected, tol, std::abs(measured - expected) <= tol};
}

// Smooth random profiles supported in the central half box.
std::vector<Eigen::VectorXd> smooth_samples(const Grid& grid, std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N;
  const double R = 0.5 * grid.domain().radius();
  std::vector<Eigen::VectorXd> out;
  for (int s = 0; s < count; ++s) {
    double a[5];
    for (double& v : a) v = N(rng);
    Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double r = grid.radius(i);
      if (r >= R) continue;
      const double bump = std::pow(std::cos(0.5 * std::numbers::pi * r / R), 2);
      const double x = grid.coordinate(i, 0) / R;
      const double y = grid.dim() > 1 ? grid.coordinate(i, 1) / R : 0.0;
      f(static_cast<Eigen::Index>(i)) = bump * (a[0] + a[1] * x + a[2] * y + a[3] * x * x + a[4] * x * y);
    }
    out.push_back(std::move(f));
  }
  return out;
}

struct Level {
  Grid grid;
  DiscreteOperator op;
};

std::vector<Level> build_levels(const Scenario& s) {
  std::vector<Level> levels;
  for (double h : s.hs) {
    auto grid = build_grid(s.domain, h);
    auto op = assemble_operator(grid, s.params, s.c, INFINITY, s.potential);
    levels.push_back({std::move(grid), std::move(op)});
  }
  return levels;
}

double tref_of(const Scenario& s, const Level& first) {
  return s.c == 0.0 ? reference_time(first.op) : reference_time(assemble_operator(first.grid, s.params, 0.0));
}

void constants_checks(const Scenario& s, std::vector<Check>& out) {
  const auto hc = hardy_constants(s.params);
  out.push_back(lower_check("intensity positive", hc.intensity, 0.0));
  out.push_back(lower_check("c* positive", hc.c_star, 0.0));
  const double lam = multiplier(s.params.beta_star(), s.params);
  out.push_back(upper_check("c* = lambda(beta*) relative gap", std::abs(lam - hc.c_star) / hc.c_star, 1e-10));
  if (s.c > 0.0 && s.c <= hc.c_star) {
    const double b = beta_of_c(s.c, s.params);
    out.push_back(upper_check("lambda(beta(c)) - c", std::abs(multiplier(b, s.params) - s.c), 1e-12 * hc.c_star));
  }
}

void operator_checks(const Scenario& s, const std::vector<Level>& levels, std::vector<Check>& out) {
  const double cs = s.c_star();
  std::vector<double> harm, gsd;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const auto& op = levels[l].op;
    const auto& L0 = op.free_operator();
    out.push_back(upper_check(level_tag(l) + " L0 symmetry", (L0 - L0.transpose()).cwiseAbs().maxCoeff(), 0.0));
    out.push_back(lower_check(level_tag(l) + " lambda_1(L0)", smallest_eigenvalue(L0), 0.0));
    const double lmin = smallest_eigenvalue(op.hamiltonian());
    if (s.c <= 0.9 * cs) out.push_back(lower_check(level_tag(l) + " lambda_min(H) (c <= 0.9 c*)", lmin, 0.0));
    if (s.c > 0.0 && s.c <= cs && s.params.d == 1) {
      harm.push_back(harmonicity_defect(op, s.c));
      out.push_back({level_tag(l) + " harmonicity defect", harm.back(), 0.0, 0.0, std::isfinite(harm.back())});
    }
    if (s.c > 0.0 && s.c <= cs) {
      const FormEvaluator fe(op, s.c);
      double worst = 0.0;
      for (const auto& f : smooth_samples(levels[l].grid, s.seed, 10)) worst = std::max(worst, ground_state_defect(fe, f));
      gsd.push_back(worst);
      out.push_back({level_tag(l) + " ground-state identity defect", worst, 0.0, 0.0, std::isfinite(worst)});
    }
  }
  for (std::size_t l = 0; l + 1 < harm.size(); ++l) {
    out.push_back(lower_check(level_tag(l + 1) + " harmonicity defect shrink factor", harm[l] / harm[l + 1], 1.5));
  }
  for (std::size_t l = 0; l + 1 < gsd.size(); ++l) {
    out.push_back(upper_check(level_tag(l + 1) + " ground-state defect ratio", gsd[l + 1] / gsd[l], 0.7));
  }
}

void kernel_checks(const Scenario& s, const std::vector<Level>& levels, double t_ref, std::vector<Check>& out) {
  const double cs = s.c_star();
  const bool weighted = s.c > 0.0 && s.c <= cs;
  const auto times = absolute_times(s, t_ref);
  if (times.empty()) throw ConfigError("kernel suite needs scenario times");
  std::vector<std::vector<double>> spreads(levels.size());
  std::vector<double> envelopes, masses;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const auto& [grid, op] = levels[l];
    const auto w = weighted ? weight_vector(grid, op.exponents(), s.c)
                            : Eigen::VectorXd::Ones(static_cast<Eigen::Index>(grid.size())).eval();
    std::vector<KernelMatrix> kernels;
    for (double t : times) kernels.push_back(heat_kernel(op, t));
    const auto K = grid.domain().central_box(0.5);
    const auto fit = kernel_sandwich(kernels, grid, w, K, s.params.alpha);
    for (std::size_t j = 0; j < times.size(); ++j) {
      const auto tag = level_tag(l) + time_tag(s.times[j]);
      out.push_back(lower_check(tag + " min p/(w w) on K", fit.kappa[j], 0.0));
      out.push_back(upper_check(tag + " kernel symmetry",
                                (kernels[j].entries - kernels[j].entries.transpose()).cwiseAbs().maxCoeff() /
                                    kernels[j].entries.cwiseAbs().maxCoeff(),
                                1e-10));
      spreads[l].push_back(fit.spread[j]);
      out.push_back({tag + " ratio spread on K", fit.spread[j], 0.0, 0.0, std::isfinite(fit.spread[j])});
    }
    if (kernels.size() >= 2) {
      const auto env = ultracontractive_envelope(kernels, w, s.params);
      envelopes.push_back(env.C);
      out.push_back({level_tag(l) + " envelope t^{d/a} sup p/(w w)", env.C, 0.0, 0.0, std::isfinite(env.C)});
    }
    if (weighted) {
      double m = 0.0;
      for (const auto& k : kernels) m = std::max(m, weighted_row_mass(k, w));
      masses.push_back(m);
      out.push_back({level_tag(l) + " weighted row mass", m, 1.0, 0.0, std::isfinite(m)});
      // Concentrating initial data in L1(w).
      std::vector<Eigen::VectorXd> samples;
      for (double r : {0.2, 0.1, 0.05, 4 * grid.spacing(), 2 * grid.spacing()}) {
        Eigen::VectorXd u(static_cast<Eigen::Index>(grid.size()));
        for (std::size_t i = 0; i < grid.size(); ++i) u(static_cast<Eigen::Index>(i)) = grid.radius(i) <= r ? 1.0 : 0.0;
        samples.push_back(u);
      }
      const auto l1 = weighted_l1_bound(kernels.front(), w, samples);
      out.push_back(upper_check(level_tag(l) + " L1(w)->L2 quotient vs kernel bound", l1.max_quotient,
                                l1.global_bound * (1 + 1e-12)));
    }
  }
  for (std::size_t l = 0; l + 1 < levels.size(); ++l) {
    for (std::size_t j = 0; j < spreads[l].size(); ++j) {
      const double r = spreads[l + 1][j] / spreads[l][j];
      out.push_back(upper_check(level_tag(l + 1) + time_tag(s.times[j]) + " spread change factor",
                                std::max(r, 1.0 / r), 2.0));
    }
    if (l + 1 < envelopes.size()) {
      out.push_back(upper_check(level_tag(l + 1) + " envelope relative change",
                                std::abs(envelopes[l + 1] - envelopes[l]) / envelopes[l], 0.25));
    }
    if (l + 1 < masses.size()) {
      const double e0 = std::max(masses[l] - 1.0, 0.0), e1 = std::max(masses[l + 1] - 1.0, 0.0);
      out.push_back({level_tag(l + 1) + " weighted mass excess shrinking", e1, e0, 0.0, e1 <= e0});
    }
  }
  // Nested domain comparison on the coarsest level.
  const auto& first = levels.front();
  const auto inner_dom = first.grid.domain().central_box(0.5);
  try {
    const auto inner = build_grid(inner_dom, first.grid.spacing());
    const auto inner_op = assemble_operator(inner, s.params, s.c, INFINITY, s.potential);
    const auto po = heat_kernel(first.op, times.front());
    const auto pi = heat_kernel(inner_op, times.front());
    out.push_back(lower_check("nested domain p^Omega - p^B", kernel_domination_gap(po, first.grid, pi, inner), -1e-12));
  } catch (const ConfigError&) {
    // central box not aligned with the grid; the comparison is skipped
  }
}

void sharp_checks(const Scenario& s, const std::vector<Level>& levels, double t_ref, std::vector<Check>& out,
                  std::vector<std::pair<std::size_t, MinimalSolution>>* keep = nullptr) {
  const double cs = s.c_star();
  if (!(s.c > 0.0 && s.c <= cs * (1 + 1e-14))) throw ConfigError("suite sharp requires 0 < c <= c*");
  const auto times = absolute_times(s, t_ref);
  if (times.empty()) throw ConfigError("sharp suite needs scenario times");
  const double beta = beta_of_c(s.c, s.params);
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const auto& [grid, op] = levels[l];
    const auto u0 = initial_datum(s, grid);
    auto ms = minimal_solution(op, u0, times, s.k_schedule, s.scheme);
    out.push_back(lower_check(level_tag(l) + " monotone in k (worst increment)", ms.worst_monotonicity,
                              -ms.monotonicity_tolerance));
    out.push_back(upper_check(level_tag(l) + " last k increment", ms.last_increment, 1e-6));
    if (l == 0) {
      const auto r65 = duhamel_residual(ms.solution, u0, op, 65);
      const auto r129 = duhamel_residual(ms.solution, u0, op, 129);
      for (std::size_t j = 0; j < times.size(); ++j) {
        out.push_back(upper_check(time_tag(s.times[j]) + " Duhamel residual (65 points)", r65[j], 1e-3));
        out.push_back(upper_check(time_tag(s.times[j]) + " Duhamel residual ratio 129/65", r129[j] / r65[j], 0.5));
      }
    }
    if (l + 1 == levels.size()) {
      for (std::size_t j = 0; j < times.size(); ++j) {
        const auto fit = singularity_exponent(grid, ms.solution.states[j], beta);
        out.push_back({level_tag(l) + time_tag(s.times[j]) + " singularity slope", fit.slope, -beta,
                       std::max(0.05, 2 * fit.slope_stderr), fit.pass});
      }
    }
    if (keep) keep->emplace_back(l, std::move(ms));
  }
}

void lp_checks(const Scenario& s, const std::vector<Level>& levels, double t_ref, std::vector<Check>& out) {
  const double cs = s.c_star();
  if (!(s.c > 0.0 && s.c <= cs)) throw ConfigError("suite lp requires 0 < c <= c*");
  if (levels.size() < 3) throw ConfigError("suite lp needs at least three grid levels");
  const auto times = absolute_times(s, t_ref);
  if (times.empty()) throw ConfigError("lp suite needs scenario times");
  const double beta = beta_of_c(s.c, s.params);
  std::vector<Eigen::VectorXd> states;
  for (const auto& [grid, op] : levels) {
    states.push_back(minimal_solution(op, initial_datum(s, grid), {times.back()}, s.k_schedule, s.scheme)
                         .solution.states[0]);
  }
  std::vector<std::pair<const Grid*, Eigen::VectorXd>> lv;
  for (std::size_t l = 0; l < levels.size(); ++l) lv.emplace_back(&levels[l].grid, states[l]);
  const double pc = s.params.d / beta;
  const auto res = lp_scan(lv, {1.0, 0.9 * pc, 1.1 * pc, 1.5 * pc}, beta);
  for (const auto& cls : res) {
    std::ostringstream name;
    name << "p=" << cls.p << " " << to_string(cls.verdict) << " (growth exponent, expected d-p*beta)";
    out.push_back({name.str(), cls.growth_exponent, cls.expected_exponent, 0.15, cls.pass});
  }
}

void blowup_checks(const Scenario& s, double t_ref, std::vector<Check>& out) {
  const double cs = s.c_star();
  if (s.c > cs) {
    auto u0 = [&](const Grid& g) { return initial_datum(s, g); };
    const auto rep = blowup_diagnostic(s.params, s.c, s.domain, s.hs, 0.1 * t_ref, u0, 10.0, s.potential);
    for (std::size_t l = 0; l < rep.spectrum.lambda_min.size(); ++l) {
      out.push_back({level_tag(l) + " lambda_min(H)", rep.spectrum.lambda_min[l], 0.0, 0.0, true});
    }
    out.push_back({"lambda_min strictly decreasing", rep.spectrum.strictly_decreasing ? 1.0 : 0.0, 1.0, 0.0,
                   rep.spectrum.strictly_decreasing});
    out.push_back({"lambda_min decrements growing", rep.spectrum.growing_decrements ? 1.0 : 0.0, 1.0, 0.0,
                   rep.spectrum.growing_decrements});
    out.push_back(lower_check("probe growth over k ladder (finest grid)", rep.probe_growth, 10.0));
    out.push_back(near_check("mechanism sum slope vs log(1/h)", rep.mechanism_fit.slope, rep.mechanism_expected,
                             0.25 * rep.mechanism_expected));
    out.push_back({"blow-up verdict", rep.blowup ? 1.0 : 0.0, 1.0, 0.0, rep.blowup});
  } else {
    const auto scan = spectral_scan(s.params, s.c, s.domain, s.hs, s.potential);
    for (std::size_t l = 0; l < scan.lambda_min.size(); ++l) {
      out.push_back({level_tag(l) + " lambda_min(H)", scan.lambda_min[l], 0.0, 0.0, true});
    }
    out.push_back({"lambda_min bounded below", scan.bounded_below ? 1.0 : 0.0, 1.0, 0.0, scan.bounded_below});
  }
}

}  // namespace

bool Report::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

json Report::to_json() const {
  json j;
  j["suite"] = suite;
  j["scenario"] = scenario.to_json();
  j["seed"] = scenario.seed;
  j["grid_levels"] = scenario.hs;
  j["threads"] = threads;
  json arr = json::array();
  for (const auto& c : checks) {
    arr.push_back({{"name", c.name}, {"measured", c.measured}, {"expected", c.expected},
                   {"tolerance", c.tolerance}, {"pass", c.pass}});
  }
  j["checks"] = arr;
  j["pass"] = all_pass();
  return j;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"constants", "operator", "kernel", "sharp", "lp", "blowup", "all"};
  return names;
}

RunStore::RunStore(std::filesystem::path root) : root_(std::move(root)) {
  for (const char* sub : {"scenarios", "operators", "trajectories", "kernels", "reports"}) {
    std::filesystem::create_directories(root_ / sub);
  }
}

std::filesystem::path RunStore::path(const std::string& kind, const std::string& file) const {
  return root_ / kind / file;
}

std::filesystem::path RunStore::report_path(const Scenario& s, const std::string& suite) const {
  return path("reports", s.hash() + "-" + suite + ".json");
}

void RunStore::save_scenario(const Scenario& s) const {
  write_json(path("scenarios", s.hash() + ".json"), s.to_json());
}

std::mutex& RunStore::lock_for(const std::string& hash) {
  std::lock_guard guard(table_mutex_);
  for (auto& [h, m] : locks_) {
    if (h == hash) return *m;
  }
  locks_.emplace_back(hash, std::make_unique<std::mutex>());
  return *locks_.back().second;
}

std::filesystem::path default_output_root() {
  if (const char* env = std::getenv("HARDYHEAT_OUT"); env && *env) return env;
  return "hardyheat-runs";
}

Report evaluate_suite(const Scenario& s, const std::string& suite) {
  if (std::find(suite_names().begin(), suite_names().end(), suite) == suite_names().end()) {
    throw ConfigError("unknown suite '" + suite + "'");
  }
  Report rep;
  rep.suite = suite;
  rep.scenario = s;
  rep.threads = current_threads();
  const bool all = suite == "all";
  if (suite == "constants" || all) constants_checks(s, rep.checks);
  if (suite == "constants") return rep;
  const auto levels = build_levels(s);
  const double t_ref = tref_of(s, levels.front());
  const double cs = s.c_star();
  if (suite == "operator" || all) operator_checks(s, levels, rep.checks);
  if (suite == "kernel" || all) kernel_checks(s, levels, t_ref, rep.checks);
  if (suite == "sharp" || (all && s.c > 0.0 && s.c <= cs)) sharp_checks(s, levels, t_ref, rep.checks);
  if (suite == "lp" || (all && s.c > 0.0 && s.c <= cs && levels.size() >= 3)) lp_checks(s, levels, t_ref, rep.checks);
  if (suite == "blowup" || (all && levels.size() >= 3)) blowup_checks(s, t_ref, rep.checks);
  return rep;
}

std::filesystem::path run_suite(RunStore& store, const Scenario& s, const std::string& suite, bool force) {
  const auto out = store.report_path(s, suite);
  std::lock_guard guard(store.lock_for(s.hash()));
  if (!force && std::filesystem::exists(out)) return out;
  Report rep;
  try {
    rep = evaluate_suite(s, suite);
  } catch (const ConfigError& e) {
    throw ConfigError("scenario '" + s.name + "' suite " + suite + ": " + e.what());
  } catch (const InvariantViolation& e) {
    throw InvariantViolation("scenario '" + s.name + "' suite " + suite + ": " + e.what());
  } catch (const std::exception& e) {
    throw std::runtime_error("scenario '" + s.name + "' suite " + suite + ": " + e.what());
  }
  store.save_scenario(s);
  write_json(out, rep.to_json());
  return out;
}

SweepResult sweep(RunStore& store, const Scenario& base, const std::vector<double>& c_factors,
                  const std::string& suite, int threads, bool force) {
  std::vector<Scenario> jobs;
  for (double f : c_factors) {
    Scenario s = base;
    s.c = f * base.c_star();
    s.c_spec = format_number(f) + "*cstar";
    s.name = base.name + "-c" + format_number(f);
    jobs.push_back(std::move(s));
  }
  SweepResult res;
  res.reports.resize(jobs.size());
  res.passed.assign(jobs.size(), false);
  res.cached.assign(jobs.size(), false);
  std::vector<std::string> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        const auto path = store.report_path(jobs[i], suite);
        res.cached[i] = !force && std::filesystem::exists(path);
        res.reports[i] = run_suite(store, jobs[i], suite, force);
        std::ifstream in(res.reports[i]);
        res.passed[i] = json::parse(in).value("pass", false);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const int n = std::max(1, std::min<int>(threads, static_cast<int>(jobs.size())));
#ifdef _OPENMP
  // Scenario-level parallelism; keep linear algebra single threaded per job.
  const int saved = omp_get_max_threads();
  if (n > 1) omp_set_num_threads(1);
#endif
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
#ifdef _OPENMP
  omp_set_num_threads(saved);
#endif
  for (const auto& e : errors) {
    if (!e.empty()) throw std::runtime_error("sweep: " + e);
  }
  return res;
}

std::string format_number(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void write_json(const std::filesystem::path& path, const json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << j.dump(2) << "\n";
  }
  std::filesystem::rename(tmp, path);
}

void write_state_csv(const std::filesystem::path& path, const Grid& grid, const Eigen::VectorXd& u) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << (grid.dim() == 1 ? "x,u\n" : "x,y,u\n");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (int k = 0; k < grid.dim(); ++k) out << format_number(grid.coordinate(i, k)) << ',';
    out << format_number(u(static_cast<Eigen::Index>(i))) << '\n';
  }
}

std::string write_triples_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::string body = "i,j,value\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (m(i, j) == 0.0) continue;
      body += std::to_string(i) + ',' + std::to_string(j) + ',' + format_number(m(i, j)) + '\n';
    }
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << body;
  return fnv1a_hex(body);
}

}  // namespace hardyheat
