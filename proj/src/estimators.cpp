#include "hardyheat/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hardyheat/errors.hpp"
#include "hardyheat/exterior.hpp"

namespace hardyheat {

namespace {

bool strictly_inside(const Domain& K, const Domain& omega) {
  if (K.dim() != omega.dim()) return false;
  for (int k = 0; k < K.dim(); ++k) {
    const auto& a = K.axes[static_cast<std::size_t>(k)];
    const auto& b = omega.axes[static_cast<std::size_t>(k)];
    if (!(a.lo > b.lo && a.hi < b.hi && a.lo <= a.hi)) return false;
  }
  return true;
}

// Entry of p_t / (w_i w_j) with the extreme values over index sets.
std::pair<double, double> ratio_range(const KernelMatrix& kernel, const Eigen::VectorXd& w,
                                      const std::vector<std::size_t>& nodes) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t a : nodes) {
    for (std::size_t b : nodes) {
      const auto i = static_cast<Eigen::Index>(a), j = static_cast<Eigen::Index>(b);
      const double r = kernel.entries(i, j) / (w(i) * w(j));
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
  }
  return {lo, hi};
}

}  // namespace

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ContractError("fit_line: need >= 2 paired points");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw ContractError("fit_line: abscissae are all equal");
  LineFit fit;
  fit.points = x.size();
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (x.size() > 2) {
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double e = y[i] - fit.intercept - fit.slope * x[i];
      ss += e * e;
    }
    fit.slope_stderr = std::sqrt(ss / (n - 2.0) / sxx);
  }
  return fit;
}

double reference_time(const DiscreteOperator& op) {
  return 1.0 / smallest_eigenvalue(op.free_operator());
}

double harmonicity_defect(const DiscreteOperator& op, double c, double min_radius, double min_boundary) {
  const auto& grid = op.grid();
  const auto& map = op.exponents();
  const double beta = map.beta_of_c(c);
  const double lam = map.multiplier(beta);
  const auto w = weight_vector(grid, map, c);
  const Eigen::VectorXd Lw = op.free_operator() * w;
  double defect = 0.0;
  std::size_t probes = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.radius(i) < min_radius || grid.boundary_distance(i) < min_boundary) continue;
    const double expect = lam * std::pow(grid.radius(i), -beta - op.params().alpha) +
                          exterior_power_tail(grid.node(i), beta, grid.domain(), op.params());
    defect = std::max(defect, std::abs(Lw(static_cast<Eigen::Index>(i)) - expect) / expect);
    ++probes;
  }
  if (probes == 0) throw ConfigError("harmonicity_defect: no probe nodes satisfy the distance limits");
  return defect;
}

double ground_state_defect(const FormEvaluator& evaluator, const Eigen::VectorXd& f) {
  const Eigen::VectorXd wf = f.cwiseProduct(evaluator.weight());
  const double q = form_value(evaluator, f, FormVariant::weighted);
  const double e = form_value(evaluator, wf, FormVariant::hardy);
  return std::abs(e - q) / std::max(1.0, std::abs(q));
}

BoundFit kernel_sandwich(const std::vector<KernelMatrix>& kernels, const Grid& grid, const Eigen::VectorXd& w,
                         const Domain& K, double alpha) {
  if (!strictly_inside(K, grid.domain())) {
    throw ConfigError("kernel_sandwich: compact set " + K.describe() + " must lie strictly inside " +
                      grid.domain().describe());
  }
  const auto nodes = grid.nodes_in(K);
  if (nodes.empty()) throw ConfigError("kernel_sandwich: compact set contains no nodes");
  BoundFit fit;
  fit.K = K;
  for (const auto& kernel : kernels) {
    const auto [lo, hi] = ratio_range(kernel, w, nodes);
    fit.times.push_back(kernel.t);
    fit.kappa.push_back(lo);
    fit.upper.push_back(hi);
    fit.spread.push_back(hi / lo);
    fit.c_upper = std::max(fit.c_upper, hi * std::pow(kernel.t, grid.dim() / alpha));
  }
  return fit;
}

Envelope ultracontractive_envelope(const std::vector<KernelMatrix>& kernels, const Eigen::VectorXd& w,
                                   const FractionalParams& p) {
  if (kernels.size() < 2) throw ConfigError("ultracontractive_envelope: need at least two times");
  Envelope env;
  const double power = p.d / p.alpha;
  std::vector<double> lt, ls;
  for (const auto& kernel : kernels) {
    const Eigen::MatrixXd R = kernel.entries.array() / (w * w.transpose()).array();
    const double sup = R.maxCoeff();
    env.times.push_back(kernel.t);
    env.sup_ratio.push_back(sup);
    env.scaled.push_back(std::pow(kernel.t, power) * sup);
    if (env.scaled.back() > env.C) {
      env.C = env.scaled.back();
      env.t_at_max = kernel.t;
    }
    lt.push_back(std::log(kernel.t));
    ls.push_back(-std::log(sup));
  }
  env.decay = fit_line(lt, ls);
  return env;
}

double weighted_row_mass(const KernelMatrix& kernel, const Eigen::VectorXd& w) {
  const Eigen::VectorXd mass = (kernel.entries * w).cwiseQuotient(w) * kernel.cell_volume;
  return mass.maxCoeff();
}

ExponentFit singularity_exponent(const Grid& grid, const Eigen::VectorXd& u, double beta, double r_lo,
                                 double r_hi) {
  ExponentFit fit;
  fit.r_lo = r_lo > 0.0 ? r_lo : 2.0 * grid.spacing();
  fit.r_hi = r_hi > 0.0 ? r_hi : 0.1 * grid.domain().radius();
  fit.target = -beta;
  std::vector<double> lr, lu;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = grid.radius(i);
    const double v = u(static_cast<Eigen::Index>(i));
    if (r < fit.r_lo || r > fit.r_hi || !(v > 0.0)) continue;
    lr.push_back(std::log(r));
    lu.push_back(std::log(v));
  }
  fit.nodes = lr.size();
  if (fit.nodes < 6) {
    throw ConfigError("singularity_exponent: fit window holds " + std::to_string(fit.nodes) +
                      " nodes, need at least 6");
  }
  const auto line = fit_line(lr, lu);
  fit.slope = line.slope;
  fit.slope_stderr = line.slope_stderr;
  fit.pass = std::abs(fit.slope + beta) <= std::max(0.05, 2.0 * fit.slope_stderr);
  return fit;
}

const char* to_string(Integrability v) noexcept {
  return v == Integrability::convergent ? "convergent" : "divergent";
}

std::vector<LpClass> lp_scan(const std::vector<std::pair<const Grid*, Eigen::VectorXd>>& levels,
                             const std::vector<double>& p_list, double beta) {
  if (levels.size() < 3) throw ConfigError("lp_scan: need at least three refinement levels");
  std::vector<LpClass> out;
  const int d = levels.front().first->dim();
  for (double p : p_list) {
    if (p < 1.0) throw ConfigError("lp_scan: p must be >= 1");
    LpClass cls;
    cls.p = p;
    cls.expected_exponent = d - p * beta;
    std::vector<double> lh, linc;
    for (const auto& [grid, u] : levels) {
      cls.values.push_back(u.cwiseAbs().array().pow(p).sum() * grid->cell_volume());
    }
    for (std::size_t l = 0; l + 1 < cls.values.size(); ++l) {
      cls.increments.push_back(cls.values[l + 1] - cls.values[l]);
      lh.push_back(std::log(levels[l + 1].first->spacing()));
      linc.push_back(std::log(std::max(std::abs(cls.increments.back()), 1e-300)));
    }
    cls.growth_exponent = fit_line(lh, linc).slope;
    const double last = std::abs(cls.increments.back());
    const double prev = std::abs(cls.increments[cls.increments.size() - 2]);
    cls.verdict = last < prev ? Integrability::convergent : Integrability::divergent;
    const bool should_converge = cls.expected_exponent > 0.0;
    if (should_converge) {
      cls.pass = cls.verdict == Integrability::convergent;
    } else {
      cls.pass = cls.verdict == Integrability::divergent &&
                 std::abs(cls.growth_exponent - cls.expected_exponent) <= 0.15;
    }
    out.push_back(std::move(cls));
  }
  return out;
}

L1Bound weighted_l1_bound(const KernelMatrix& kernel, const Eigen::VectorXd& w,
                          const std::vector<Eigen::VectorXd>& samples) {
  L1Bound out;
  const double hd = kernel.cell_volume;
  const Eigen::MatrixXd P = kernel.entries * hd;  // e^{-tH}
  const double sup = (kernel.entries.array() / (w * w.transpose()).array()).maxCoeff();
  out.global_bound = sup * l2_norm(w, hd);
  for (const auto& u0 : samples) {
    const double l1w = u0.cwiseAbs().dot(w) * hd;
    const double q = l1w > 0.0 ? l2_norm(P * u0, hd) / l1w : 0.0;
    out.quotients.push_back(q);
    out.max_quotient = std::max(out.max_quotient, q);
  }
  return out;
}

double sobolev_exponent(const FractionalParams& p, bool critical) {
  const double q = p.d / (p.d - p.alpha);
  return critical ? 0.5 * (1.0 + q) : q;
}

double sobolev_quotient(const FormEvaluator& evaluator, const std::vector<Eigen::VectorXd>& samples, double p) {
  const auto& w = evaluator.weight();
  const double hd = evaluator.op().grid().cell_volume();
  double best = 0.0;
  for (const auto& f : samples) {
    if (f.cwiseAbs().maxCoeff() == 0.0) continue;
    const double q = form_value(evaluator, f, FormVariant::weighted);
    if (!(q > 0.0)) throw InvariantViolation("sobolev_quotient: weighted form vanishes on a nonzero vector");
    const double lhs =
        std::pow((f.cwiseAbs().array().pow(2.0 * p) * w.array().square()).sum() * hd, 1.0 / p);
    best = std::max(best, lhs / q);
  }
  return best;
}

SpectralScan spectral_scan(const FractionalParams& p, double c, const Domain& domain, const std::vector<double>& hs,
                           PotentialRule rule) {
  SpectralScan scan;
  scan.h = hs;
  for (double h : hs) {
    const auto grid = build_grid(domain, h);
    scan.lambda_min.push_back(smallest_eigenvalue(assemble_operator(grid, p, c, INFINITY, rule).hamiltonian()));
  }
  scan.strictly_decreasing = true;
  for (std::size_t l = 0; l + 1 < scan.lambda_min.size(); ++l) {
    scan.decrements.push_back(scan.lambda_min[l] - scan.lambda_min[l + 1]);
    if (!(scan.decrements.back() > 0.0)) scan.strictly_decreasing = false;
  }
  scan.growing_decrements = scan.decrements.size() >= 2;
  for (std::size_t l = 0; l + 1 < scan.decrements.size(); ++l) {
    if (!(scan.decrements[l + 1] > scan.decrements[l])) scan.growing_decrements = false;
  }
  const bool growing = scan.strictly_decreasing && scan.growing_decrements;
  scan.bounded_below = !scan.lambda_min.empty() && scan.lambda_min.back() > 0.0 && !growing;
  return scan;
}

BlowupReport blowup_diagnostic(const FractionalParams& p, double c, const Domain& domain,
                               const std::vector<double>& hs, double t0,
                               const std::function<Eigen::VectorXd(const Grid&)>& u0_on,
                               double growth_threshold, PotentialRule rule) {
  const ExponentMap map(p);
  if (!(c > map.c_star())) throw ConfigError("blowup_diagnostic: requires c > c*");
  if (hs.size() < 3) throw ConfigError("blowup_diagnostic: need at least three grid levels");
  BlowupReport rep;
  rep.c = c;
  rep.t0 = t0;
  rep.spectrum = spectral_scan(p, c, domain, hs, rule);

  // Probe on the finest grid across the k ladder.
  const double h_fine = *std::min_element(hs.begin(), hs.end());
  const auto fine = build_grid(domain, h_fine);
  const auto op = assemble_operator(fine, p, c, INFINITY, rule);
  const Eigen::VectorXd u0 = u0_on(fine);
  const auto x0 = static_cast<Eigen::Index>(fine.nearest_to_origin());
  rep.ks = default_k_schedule(op);
  for (double k : rep.ks) {
    rep.probe.push_back(evolve(op.with_truncation(k), u0, {t0}).states[0](x0));
  }
  const double at_cap = rep.probe[rep.probe.size() - 2];  // last level is the stationarity certificate
  rep.probe_growth = at_cap / rep.probe.front();

  // Mechanism sum with the critical weight.
  const double r0 = 0.5 * domain.radius();
  const double beta = map.beta_star();
  std::vector<double> lx;
  for (double h : hs) {
    const auto grid = build_grid(domain, h);
    double s = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double r = grid.radius(i);
      if (r <= r0) s += std::pow(r, -2.0 * beta - p.alpha);
    }
    rep.mechanism.push_back(s * grid.cell_volume());
    lx.push_back(std::log(1.0 / h));
  }
  rep.mechanism_fit = fit_line(lx, rep.mechanism);
  rep.mechanism_expected = unit_sphere_area(p.d);

  const bool spectral = rep.spectrum.strictly_decreasing && rep.spectrum.growing_decrements;
  rep.blowup = spectral && rep.probe_growth >= growth_threshold && rep.mechanism_fit.slope > 0.0;
  return rep;
}

double weak_form_residual(const Trajectory& traj, const Eigen::VectorXd& u0, const DiscreteOperator& op,
                          const TestFunction& phi) {
  const auto& grid = op.grid();
  const std::size_t M = traj.times.size();
  if (M < 3 || traj.times.front() != 0.0) {
    throw ConfigError("weak_form_residual: trajectory must start at t = 0 on a uniform mesh of >= 3 times");
  }
  const double dt = traj.times[1] - traj.times[0];
  for (std::size_t m = 1; m < M; ++m) {
    if (std::abs(traj.times[m] - traj.times[m - 1] - dt) > 1e-9 * dt) {
      throw ConfigError("weak_form_residual: time mesh must be uniform");
    }
  }
  const auto n = static_cast<Eigen::Index>(grid.size());
  // Sample phi and reject supports that touch the boundary cells or the cells at 0.
  std::vector<Eigen::VectorXd> ph(M, Eigen::VectorXd(n));
  for (std::size_t m = 0; m < M; ++m) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double v = phi(traj.times[m], grid.node(i));
      const bool edge = grid.boundary_distance(i) < grid.spacing();
      const bool centre = grid.radius(i) < grid.spacing();
      if (v != 0.0 && (edge || centre)) {
        throw ConfigError("weak_form_residual: test function support touches the boundary or the 0-cell");
      }
      ph[m](static_cast<Eigen::Index>(i)) = v;
    }
  }
  const double hd = grid.cell_volume();
  const Eigen::VectorXd W = op.truncated_potential();
  const Eigen::MatrixXd& L0 = op.free_operator();
  double time_term = 0.0, space_term = 0.0, pot_term = 0.0;
  for (std::size_t m = 0; m < M; ++m) {
    Eigen::VectorXd dphi;
    if (m == 0) {
      dphi = (-3.0 * ph[0] + 4.0 * ph[1] - ph[2]) / (2.0 * dt);
    } else if (m == M - 1) {
      dphi = (3.0 * ph[m] - 4.0 * ph[m - 1] + ph[m - 2]) / (2.0 * dt);
    } else {
      dphi = (ph[m + 1] - ph[m - 1]) / (2.0 * dt);
    }
    const double wt = (m == 0 || m == M - 1) ? 0.5 * dt : dt;
    const auto& u = traj.states[m];
    time_term += wt * hd * u.dot(-dphi);
    space_term += wt * hd * u.dot(L0 * ph[m]);
    pot_term += wt * hd * u.dot(W.cwiseProduct(ph[m]));
  }
  const double boundary = hd * (traj.states.back().dot(ph.back()) - u0.dot(ph.front()));
  const double residual = boundary + time_term + space_term - pot_term;
  const double scale = std::max({std::abs(boundary), std::abs(time_term), std::abs(space_term), std::abs(pot_term)});
  return scale > 0.0 ? std::abs(residual) / scale : 0.0;
}

double kernel_domination_gap(const KernelMatrix& outer, const Grid& outer_grid, const KernelMatrix& inner,
                             const Grid& inner_grid) {
  if (std::abs(outer_grid.spacing() - inner_grid.spacing()) > 1e-12 * outer_grid.spacing()) {
    throw ConfigError("kernel_domination_gap: grids must share the spacing");
  }
  // Map inner nodes to outer nodes through lattice coordinates.
  const int d = inner_grid.dim();
  std::vector<Eigen::Index> map(inner_grid.size());
  for (std::size_t i = 0; i < inner_grid.size(); ++i) {
    std::vector<int> cell(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) {
      const int q = inner_grid.lattice_index(i, k);
      const double lo = outer_grid.domain().axes[static_cast<std::size_t>(k)].lo;
      cell[static_cast<std::size_t>(k)] = q + static_cast<int>(std::lround(-lo / outer_grid.spacing()));
    }
    map[i] = static_cast<Eigen::Index>(outer_grid.flat_index(cell));
  }
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < inner_grid.size(); ++i) {
    for (std::size_t j = 0; j < inner_grid.size(); ++j) {
      gap = std::min(gap, outer.entries(map[i], map[j]) -
                              inner.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
  }
  return gap;
}

}  // namespace hardyheat
