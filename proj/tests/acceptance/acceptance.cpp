// Acceptance checks. Each criterion prints exactly one PASS/FAIL line;
// `acceptance --only N` runs a single criterion (used by ctest).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hardyheat/errors.hpp"
#include "hardyheat/estimators.hpp"
#include "hardyheat/evolution.hpp"
#include "hardyheat/forms.hpp"
#include "hardyheat/operator.hpp"

using namespace hardyheat;

namespace {

const FractionalParams kRef{1, 0.5};
const Domain kOmega = Domain::interval(-1, 1);
const std::vector<int> kSizes{200, 400, 800};

double cstar() { return hardy_constant(kRef); }
double h_of(int n) { return 2.0 / n; }

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

Eigen::VectorXd ball(const Grid& g, double r) {
  Eigen::VectorXd u(static_cast<Eigen::Index>(g.size()));
  for (std::size_t i = 0; i < g.size(); ++i) u(static_cast<Eigen::Index>(i)) = g.radius(i) <= r ? 1.0 : 0.0;
  return u;
}

// T_ref = 1 / lambda_1(L0) on the coarsest reference grid.
double tref() {
  static const double t = reference_time(assemble_operator(build_grid(kOmega, h_of(kSizes.front())), kRef, 0.0));
  return t;
}

Outcome constants() {
  double worst = 0.0;
  for (int d : {1, 2, 3}) {
    for (double f : {0.25, 0.5, 0.75}) {
      const FractionalParams p{d, f * std::min(2.0, static_cast<double>(d))};
      const double cs = hardy_constant(p);
      worst = std::max(worst, std::abs(multiplier(p.beta_star(), p) - cs) / cs);
    }
  }
  return {worst <= 1e-10, "max relative gap c* vs lambda(beta*) = " + fmt(worst)};
}

Outcome harmonicity() {
  bool ok = true;
  std::string detail;
  for (double f : {0.5, 1.0}) {
    std::vector<double> defects;
    for (int n : kSizes) defects.push_back(harmonicity_defect(assemble_operator(build_grid(kOmega, h_of(n)), kRef, 0.0), f * cstar()));
    detail += " c=" + fmt(f) + "c*: defects";
    for (std::size_t l = 0; l < defects.size(); ++l) {
      detail += " " + fmt(defects[l]);
      if (l > 0) ok = ok && defects[l - 1] / defects[l] >= 1.5;
    }
    detail += " (shrink " + fmt(defects[0] / defects[1]) + ", " + fmt(defects[1] / defects[2]) + ");";
  }
  return {ok, detail};
}

Outcome monotone() {
  const double c = 0.5 * cstar();
  double worst = INFINITY;
  std::size_t levels = 0;
  for (int n : kSizes) {
    const auto g = build_grid(kOmega, h_of(n));
    const auto op = assemble_operator(g, kRef, c);
    const auto ms = minimal_solution(op, ball(g, 0.2), {0.1 * tref(), 0.5 * tref()});
    worst = std::min(worst, ms.worst_monotonicity);
    levels += ms.ks.size();
  }
  return {worst >= -1e-12, "min over n, k, t, x of u_{k+1}-u_k = " + fmt(worst) + " over " +
                                std::to_string(levels) + " k-levels"};
}

Outcome duhamel() {
  const double c = 0.5 * cstar();
  const auto g = build_grid(kOmega, h_of(800));
  const auto op = assemble_operator(g, kRef, c);
  const auto u0 = ball(g, 0.2);
  const auto ms = minimal_solution(op, u0, {0.1 * tref(), 0.5 * tref()});
  const auto r65 = duhamel_residual(ms.solution, u0, op, 65);
  const auto r129 = duhamel_residual(ms.solution, u0, op, 129);
  bool ok = true;
  std::string detail = "n=800:";
  for (std::size_t j = 0; j < r65.size(); ++j) {
    ok = ok && r65[j] <= 1e-3 && r129[j] <= 0.5 * r65[j];
    detail += " r65=" + fmt(r65[j]) + " r129=" + fmt(r129[j]) + ";";
  }
  return {ok, detail};
}

// Kernels at the given multiples of T_ref for one (c, n).
std::vector<KernelMatrix> kernels(double c, int n, const std::vector<double>& factors) {
  const auto op = assemble_operator(build_grid(kOmega, h_of(n)), kRef, c);
  std::vector<KernelMatrix> out;
  for (double f : factors) out.push_back(heat_kernel(op, f * tref()));
  return out;
}

const std::vector<double> kSandwichTimes{0.05, 0.1, 0.5, 1.0};

Outcome sandwich() {
  bool ok = true;
  std::string detail;
  for (double f : {0.5, 1.0}) {
    const double c = f * cstar();
    std::map<int, BoundFit> fits;
    for (int n : {400, 800}) {
      const auto g = build_grid(kOmega, h_of(n));
      const auto w = weight_vector(g, ExponentMap(kRef), c);
      fits[n] = kernel_sandwich(kernels(c, n, kSandwichTimes), g, w, Domain::interval(-0.5, 0.5), kRef.alpha);
    }
    detail += " c=" + fmt(f) + "c*:";
    for (std::size_t j = 0; j < kSandwichTimes.size(); ++j) {
      const double s4 = fits[400].spread[j], s8 = fits[800].spread[j];
      const double change = std::max(s8 / s4, s4 / s8);
      const bool pj = fits[800].kappa[j] > 0.0 && s8 <= 50.0 && change <= 2.0;
      ok = ok && pj;
      detail += " t=" + fmt(kSandwichTimes[j]) + "[min " + fmt(fits[800].kappa[j]) + " spread " + fmt(s8) +
                " change " + fmt(change) + (pj ? "" : " x") + "]";
    }
    detail += ";";
  }
  return {ok, detail};
}

Outcome envelope() {
  const double c = 0.5 * cstar();
  std::vector<double> factors;
  for (int j = 0; j <= 8; ++j) factors.push_back(0.02 * std::pow(100.0, j / 8.0));
  std::vector<double> C;
  for (int n : {400, 800}) {
    const auto g = build_grid(kOmega, h_of(n));
    C.push_back(ultracontractive_envelope(kernels(c, n, factors), weight_vector(g, ExponentMap(kRef), c), kRef).C);
  }
  const double change = std::abs(C[1] - C[0]) / C[0];
  return {std::isfinite(C[0]) && std::isfinite(C[1]) && change <= 0.25,
          "c=0.5c*, t in [0.02,2]T_ref: C(400)=" + fmt(C[0]) + " C(800)=" + fmt(C[1]) + " change " + fmt(change)};
}

Outcome sharp() {
  bool ok = true;
  std::string detail;
  for (double f : {0.5, 1.0}) {
    const double c = f * cstar();
    const double beta = beta_of_c(c, kRef);
    detail += " c=" + fmt(f) + "c* target " + fmt(-beta) + ":";
    for (int n : kSizes) {
      const auto g = build_grid(kOmega, h_of(n));
      const auto op = assemble_operator(g, kRef, c);
      const auto ms = minimal_solution(op, ball(g, 0.2), {0.5 * tref()});
      const auto fit = singularity_exponent(g, ms.solution.states[0], beta);
      detail += " n" + std::to_string(n) + "=" + fmt(fit.slope);
      if (n == kSizes.back()) ok = ok && std::abs(fit.slope + beta) <= 0.05;
    }
    detail += ";";
  }
  return {ok, detail + " (t=0.5 T_ref)"};
}

Outcome lp() {
  const double c = 0.5 * cstar();
  const double beta = beta_of_c(c, kRef);
  std::vector<Grid> grids;
  for (int n : kSizes) grids.push_back(build_grid(kOmega, h_of(n)));
  std::vector<std::pair<const Grid*, Eigen::VectorXd>> levels;
  for (const auto& g : grids) {
    const auto ms = minimal_solution(assemble_operator(g, kRef, c), ball(g, 0.2), {0.5 * tref()});
    levels.emplace_back(&g, ms.solution.states[0]);
  }
  const double pc = 1.0 / beta;
  const auto res = lp_scan(levels, {1.0, 0.9 * pc, 1.1 * pc, 1.5 * pc}, beta);
  bool ok = true;
  std::string detail;
  for (const auto& cls : res) {
    ok = ok && cls.pass;
    detail += " p=" + fmt(cls.p) + " " + to_string(cls.verdict) + " (e=" + fmt(cls.growth_exponent) + ", d-pb=" +
              fmt(cls.expected_exponent) + ");";
  }
  return {ok, detail};
}

Outcome blowup() {
  std::vector<double> hs;
  for (int n : kSizes) hs.push_back(h_of(n));
  bool ok = true;
  std::string detail;
  for (double f : {1.1, 1.5, 3.0}) {
    const auto rep = blowup_diagnostic(kRef, f * cstar(), kOmega, hs, 0.1 * tref(),
                                       [](const Grid& g) { return ball(g, 0.2); });
    const bool slope_ok = std::abs(rep.mechanism_fit.slope - rep.mechanism_expected) <= 0.25 * rep.mechanism_expected;
    const bool pf = rep.blowup && slope_ok;
    ok = ok && pf;
    detail += " " + fmt(f) + "c*: lambda";
    for (double l : rep.spectrum.lambda_min) detail += " " + fmt(l);
    detail += " probe x" + fmt(rep.probe_growth) + " slope " + fmt(rep.mechanism_fit.slope) + (pf ? "" : " x") + ";";
  }
  for (double f : {0.5, 0.9, 1.0}) {
    const auto scan = spectral_scan(kRef, f * cstar(), kOmega, hs);
    ok = ok && scan.bounded_below;
    detail += " " + fmt(f) + "c*: lambda";
    for (double l : scan.lambda_min) detail += " " + fmt(l);
    detail += scan.bounded_below ? " bounded;" : " unbounded x;";
  }
  return {ok, detail};
}

std::vector<Eigen::VectorXd> interior_samples(const Grid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N;
  std::vector<Eigen::VectorXd> out;
  for (int s = 0; s < 10; ++s) {
    double a[4];
    for (double& v : a) v = N(rng);
    Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.size()));
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = g.coordinate(i, 0);
      if (std::abs(x) >= 0.5) continue;
      const double bump = std::pow(std::cos(std::numbers::pi * x), 2);
      f(static_cast<Eigen::Index>(i)) = bump * (a[0] + a[1] * x + a[2] * x * x + a[3] * std::sin(6 * x));
    }
    out.push_back(std::move(f));
  }
  return out;
}

Outcome ground_state() {
  bool ok = true;
  std::string detail;
  for (double f : {0.5, 1.0}) {
    const double c = f * cstar();
    std::vector<double> defects;
    for (int n : kSizes) {
      const auto g = build_grid(kOmega, h_of(n));
      const auto op = assemble_operator(g, kRef, c);
      const FormEvaluator fe(op, c);
      double worst = 0.0;
      for (const auto& v : interior_samples(g, 2024)) worst = std::max(worst, ground_state_defect(fe, v));
      defects.push_back(worst);
    }
    detail += " c=" + fmt(f) + "c*: defects";
    for (std::size_t l = 0; l < defects.size(); ++l) {
      detail += " " + fmt(defects[l]);
      if (l > 0) ok = ok && defects[l] <= 0.7 * defects[l - 1];
    }
    detail += ";";
  }
  return {ok, detail};
}

Outcome sub_markov() {
  bool ok = true;
  std::string detail;
  for (double f : {0.5, 1.0}) {
    const double c = f * cstar();
    std::vector<double> eps;
    for (int n : {400, 800}) {
      const auto g = build_grid(kOmega, h_of(n));
      const auto w = weight_vector(g, ExponentMap(kRef), c);
      double m = 0.0;
      for (const auto& k : kernels(c, n, kSandwichTimes)) m = std::max(m, weighted_row_mass(k, w));
      eps.push_back(m - 1.0);
    }
    const bool pf = eps[1] <= std::max(eps[0], 0.0);
    ok = ok && pf;
    detail += " c=" + fmt(f) + "c*: max mass-1 = " + fmt(eps[0]) + " (400), " + fmt(eps[1]) + " (800);";
  }
  return {ok, detail};
}

Outcome weighted_l1() {
  bool ok = true;
  std::string detail;
  for (double f : {0.5, 1.0}) {
    const double c = f * cstar();
    std::vector<double> maxima;
    for (int n : {400, 800}) {
      const auto g = build_grid(kOmega, h_of(n));
      const auto w = weight_vector(g, ExponentMap(kRef), c);
      std::vector<Eigen::VectorXd> samples;
      for (double r : {0.2, 0.1, 0.05, 4 * g.spacing(), 2 * g.spacing()}) samples.push_back(ball(g, r));
      const auto res = weighted_l1_bound(kernels(c, n, {0.1})[0], w, samples);
      ok = ok && res.max_quotient <= res.global_bound * (1 + 1e-12);
      maxima.push_back(res.max_quotient);
      if (n == 800) {
        detail += " c=" + fmt(f) + "c* quotients";
        for (double q : res.quotients) detail += " " + fmt(q);
        detail += " (bound " + fmt(res.global_bound) + ")";
      }
    }
    ok = ok && maxima[1] <= 2.0 * maxima[0];
    detail += ";";
  }
  return {ok, detail};
}

struct Criterion {
  int id;
  const char* title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "constants: c* = lambda(beta*)", constants},
      {2, "harmonicity defect shrinks >= 1.5x per halving", harmonicity},
      {3, "monotone minimal solution in k", monotone},
      {4, "Duhamel residual", duhamel},
      {5, "kernel sandwich on K", sandwich},
      {6, "ultracontractive envelope", envelope},
      {7, "sharp singularity exponent", sharp},
      {8, "L^p threshold", lp},
      {9, "blow-up above c*, bounded below up to c*", blowup},
      {10, "ground-state identity defect", ground_state},
      {11, "weighted sub-Markov", sub_markov},
      {12, "weighted L1 extension", weighted_l1},
  };
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--only" && i + 1 < argc) only = std::atoi(argv[++i]);
  }
  int failed = 0;
  for (const auto& c : all) {
    if (only && c.id != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (out.pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.title << " |" << out.detail << " ("
              << fmt(secs) << " s)" << std::endl;
    failed += out.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
