#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hardyheat/evolution.hpp"
#include "hardyheat/forms.hpp"
#include "hardyheat/operator.hpp"

namespace hardyheat {

/// Least-squares line y = intercept + slope x with the slope's standard error.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  std::size_t points = 0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// 1 / lambda_1(L0): the natural time unit of a domain.
double reference_time(const DiscreteOperator& op);

/// Max over probe nodes of |(L0 w)_i - lambda(beta)|x_i|^{-beta-a} - T(x_i)| / expected,
/// where T is the exterior power tail. Probes: |x| >= min_radius and distance
/// to the boundary >= min_boundary.
double harmonicity_defect(const DiscreteOperator& op, double c, double min_radius = 0.25,
                          double min_boundary = 0.25);

/// |hardy(w f) - weighted(f)| / max(1, weighted(f)).
double ground_state_defect(const FormEvaluator& evaluator, const Eigen::VectorXd& f);

/// Kernel ratios R_ij = p_t(x_i, x_j) / (w_i w_j) on K x K, one entry per kernel.
struct BoundFit {
  Domain K;
  std::vector<double> times;
  std::vector<double> kappa;   // min R
  std::vector<double> upper;   // max R
  std::vector<double> spread;  // max R / min R
  /// max over t of max R * t^{d/a}.
  double c_upper = 0.0;
};

/// Throws ConfigError unless K lies strictly inside the domain.
BoundFit kernel_sandwich(const std::vector<KernelMatrix>& kernels, const Grid& grid,
                         const Eigen::VectorXd& w, const Domain& K, double alpha);

struct Envelope {
  std::vector<double> times;
  std::vector<double> sup_ratio;  // max over all i, j of p_t / (w_i w_j)
  std::vector<double> scaled;     // t^{d/a} * sup_ratio
  double C = 0.0;
  double t_at_max = 0.0;
  /// Fitted decay exponent g with sup_ratio ~ t^{-g}.
  LineFit decay;
};

Envelope ultracontractive_envelope(const std::vector<KernelMatrix>& kernels, const Eigen::VectorXd& w,
                                   const FractionalParams& p);

/// max_i sum_j p_t(x_i, x_j) (w_j / w_i) h^d.
double weighted_row_mass(const KernelMatrix& kernel, const Eigen::VectorXd& w);

struct ExponentFit {
  double r_lo = 0.0;
  double r_hi = 0.0;
  std::size_t nodes = 0;
  double slope = 0.0;
  double slope_stderr = 0.0;
  double target = 0.0;
  bool pass = false;
};

/// Slope of log u against log |x| for r in [r_lo, r_hi] (defaults 2h and
/// 0.1 * radius). Pass iff |slope + beta| <= max(0.05, 2 stderr).
ExponentFit singularity_exponent(const Grid& grid, const Eigen::VectorXd& u, double beta,
                                 double r_lo = -1.0, double r_hi = -1.0);

enum class Integrability { convergent, divergent };
const char* to_string(Integrability v) noexcept;

struct LpClass {
  double p = 0.0;
  std::vector<double> values;      // sum |u|^p h^d per level
  std::vector<double> increments;  // successive differences
  double growth_exponent = 0.0;    // fitted exponent e of |increment| ~ h^e
  double expected_exponent = 0.0;  // d - p beta
  Integrability verdict = Integrability::convergent;
  bool pass = false;
};

/// levels: solutions at a fixed time on successively halved grids.
/// Convergent iff the increments shrink; divergent ones must also match the
/// growth exponent d - p beta within 0.15.
std::vector<LpClass> lp_scan(const std::vector<std::pair<const Grid*, Eigen::VectorXd>>& levels,
                             const std::vector<double>& p_list, double beta);

struct L1Bound {
  std::vector<double> quotients;  // |e^{-tH}u0|_2 / |u0|_{L1(w)} per sample
  double max_quotient = 0.0;
  double global_bound = 0.0;      // sup_ij p_t/(w_i w_j) * |w|_2
};

L1Bound weighted_l1_bound(const KernelMatrix& kernel, const Eigen::VectorXd& w,
                          const std::vector<Eigen::VectorXd>& samples);

/// Sobolev exponent: d/(d-a) for c < c*, (1 + d/(d-a))/2 at c = c*.
double sobolev_exponent(const FractionalParams& p, bool critical);

/// max over samples of |f^2|_{L^p(w^2)} / Q^c[f].
double sobolev_quotient(const FormEvaluator& evaluator, const std::vector<Eigen::VectorXd>& samples,
                        double p);

struct SpectralScan {
  std::vector<double> h;
  std::vector<double> lambda_min;
  std::vector<double> decrements;  // lambda_min[l] - lambda_min[l+1]
  bool strictly_decreasing = false;
  bool growing_decrements = false;
  bool bounded_below = false;  // lambda_min(finest) > 0 and decrements not growing
};

SpectralScan spectral_scan(const FractionalParams& p, double c, const Domain& domain,
                           const std::vector<double>& hs, PotentialRule rule = PotentialRule::lattice);

struct BlowupReport {
  double c = 0.0;
  SpectralScan spectrum;
  double t0 = 0.0;
  std::vector<double> ks;
  std::vector<double> probe;  // u_k(t0, x0) on the finest grid
  double probe_growth = 0.0;  // probe at cap / probe at first k
  std::vector<double> mechanism;  // S(h) per level
  LineFit mechanism_fit;          // S against log(1/h)
  double mechanism_expected = 0.0;
  bool blowup = false;
};

/// Requires c > c*. t0 in absolute time; u0_on samples the initial datum on a grid.
BlowupReport blowup_diagnostic(const FractionalParams& p, double c, const Domain& domain,
                               const std::vector<double>& hs, double t0,
                               const std::function<Eigen::VectorXd(const Grid&)>& u0_on,
                               double growth_threshold = 10.0,
                               PotentialRule rule = PotentialRule::lattice);

/// Space-time test function phi(t, x) and its support check.
using TestFunction = std::function<double(double, std::span<const double>)>;

/// Residual of the weak heat identity at the final time of a trajectory on a
/// uniform time mesh, divided by the largest of its terms. phi_t by central
/// differences, time integrals by the trapezoid rule.
double weak_form_residual(const Trajectory& traj, const Eigen::VectorXd& u0, const DiscreteOperator& op,
                          const TestFunction& phi);

/// min over shared nodes of p^Omega - p^B for B inside Omega on the same lattice.
double kernel_domination_gap(const KernelMatrix& outer, const Grid& outer_grid, const KernelMatrix& inner,
                             const Grid& inner_grid);

}  // namespace hardyheat
