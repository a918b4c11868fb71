#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hardyheat/operator.hpp"

namespace hardyheat {

enum class Scheme { expm, crank_nicolson, implicit_euler };

const char* to_string(Scheme s) noexcept;
Scheme scheme_from_string(const std::string& name);

/// e^{-tM} for a symmetric matrix M by Pade-13 scaling and squaring; the
/// result is symmetrised. t = 0 gives the identity.
Eigen::MatrixXd propagator(const Eigen::MatrixXd& M, double t);

struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  double c = 0.0;
  double k = 0.0;
  Scheme scheme = Scheme::expm;
  /// Stepping schemes: max over times of |u_dt - u_dt/2| / |u|, the Richardson
  /// estimate of the time error. Zero for expm.
  double time_error = 0.0;

  /// State at a stored time (exact match within 1e-12 relative).
  const Eigen::VectorXd& at(double t) const;
};

/// u(t) = e^{-tH} u0 at the requested times (nonnegative, strictly increasing).
/// Stepping schemes use steps no longer than max(times)/200.
Trajectory evolve(const Eigen::MatrixXd& H, const Eigen::VectorXd& u0,
                  const std::vector<double>& times, Scheme scheme = Scheme::expm);
Trajectory evolve(const DiscreteOperator& op, const Eigen::VectorXd& u0,
                  const std::vector<double>& times, Scheme scheme = Scheme::expm);

/// p_t(x_i, x_j) ~ [e^{-tH}]_ij / h^d.
struct KernelMatrix {
  double t = 0.0;
  double c = 0.0;
  double k = 0.0;
  double cell_volume = 1.0;
  Eigen::MatrixXd entries;
};

KernelMatrix heat_kernel(const DiscreteOperator& op, double t);

/// x4 ladder from below min V (fully truncated) up to max V, then 4 * max V
/// where the potential is untouched and u_k must be stationary.
std::vector<double> default_k_schedule(const DiscreteOperator& op);

struct MinimalSolution {
  enum class Mode { convergence, divergence };
  Mode mode = Mode::convergence;
  std::vector<double> ks;
  std::vector<Trajectory> levels;  // one per k
  Trajectory solution;             // the last level
  /// min over levels, nodes and times of u_{k_{j+1}} - u_{k_j} (>= -tolerance).
  double worst_monotonicity = 0.0;
  double monotonicity_tolerance = 0.0;
  /// max over nodes and times of |u_last - u_prev| / max|u_last| at each time.
  double last_increment = 0.0;
  bool converged = false;
};

/// Monotone truncation scheme u_k -> u_inf. Throws InvariantViolation if some
/// u_{k+1} falls below u_k by more than 1e-12 max(1, |u0|_inf).
MinimalSolution minimal_solution(const DiscreteOperator& op, const Eigen::VectorXd& u0,
                                 const std::vector<double>& times,
                                 std::vector<double> k_schedule = {},
                                 Scheme scheme = Scheme::expm);

/// |u(t) - e^{-tL0}u0 - int_0^t e^{-(t-s)L0} (V^k u)(s) ds|_h / |u(t)|_h per
/// stored time, the integral by composite Simpson on `points` nodes (odd).
/// op supplies L0 and the truncated potential used for the trajectory.
std::vector<double> duhamel_residual(const Trajectory& traj, const Eigen::VectorXd& u0,
                                     const DiscreteOperator& op, int points);

/// Discrete L2 norm (sum f_i^2 h^d)^{1/2}.
double l2_norm(const Eigen::VectorXd& f, double cell_volume);

}  // namespace hardyheat
