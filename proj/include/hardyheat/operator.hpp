#pragma once

#include <limits>
#include <memory>

#include <Eigen/Dense>

#include "hardyheat/grid.hpp"
#include "hardyheat/specfun.hpp"

namespace hardyheat {

/// How the Hardy potential c|x|^{-a} is sampled at the nodes.
enum class PotentialRule {
  lattice,  // w_c exactly harmonic for the infinite-lattice operator (1D only)
  point,    // c |x_i|^{-a}
};

const char* to_string(PotentialRule rule) noexcept;
PotentialRule potential_rule_from_string(const std::string& name);

/// Node values of the Hardy potential V_c. For the lattice rule with c > c*
/// the critical profile is rescaled: V_c = (c/c*) V_{c*}.
Eigen::VectorXd hardy_potential(const Grid& grid, const ExponentMap& map, double c,
                                PotentialRule rule);

/// Node values of w_c (0 < c <= c*); c = 0 gives the constant 1.
Eigen::VectorXd weight_vector(const Grid& grid, const ExponentMap& map, double c);

/// Assembled Dirichlet fractional Laplacian plus (truncated) Hardy potential.
///
///   (L0 f)_i = sum_j J_ij (f_i - f_j) + (kappa_i + b_i) f_i
///   H = L0 - diag(min(V, k))
///
/// J holds lattice cell-integral weights including the own-cell moment term on
/// nearest neighbours; b_i is that same moment term for neighbours lying
/// outside the domain. Immutable; copies share the dense storage.
class DiscreteOperator {
 public:
  const Grid& grid() const noexcept { return *grid_; }
  const ExponentMap& exponents() const noexcept { return map_; }
  const FractionalParams& params() const noexcept { return map_.params(); }
  double strength() const noexcept { return c_; }
  double truncation() const noexcept { return k_; }
  PotentialRule rule() const noexcept { return rule_; }
  std::size_t size() const noexcept { return grid_->size(); }

  /// Symmetric jump weights, zero diagonal.
  const Eigen::MatrixXd& jump() const noexcept { return *jump_; }
  /// Continuum killing rate at the nodes.
  const Eigen::VectorXd& killing() const noexcept { return *killing_; }
  /// Own-cell moment mass lost through exterior nearest neighbours.
  const Eigen::VectorXd& boundary_correction() const noexcept { return *boundary_; }
  /// Untruncated potential V.
  const Eigen::VectorXd& potential() const noexcept { return *potential_; }
  Eigen::VectorXd truncated_potential() const;

  const Eigen::MatrixXd& free_operator() const noexcept { return *free_; }
  Eigen::MatrixXd hamiltonian() const;
  /// y = H x without forming H.
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;

  /// Same grid and potential, new truncation level (k = inf means none).
  DiscreteOperator with_truncation(double k) const;

 private:
  friend DiscreteOperator assemble_operator(const Grid&, const FractionalParams&, double, double,
                                            PotentialRule);
  explicit DiscreteOperator(const FractionalParams& p) : map_(p) {}

  std::shared_ptr<const Grid> grid_;
  ExponentMap map_;
  double c_ = 0.0;
  double k_ = std::numeric_limits<double>::infinity();
  PotentialRule rule_ = PotentialRule::lattice;
  std::shared_ptr<const Eigen::MatrixXd> jump_;
  std::shared_ptr<const Eigen::VectorXd> killing_;
  std::shared_ptr<const Eigen::VectorXd> boundary_;
  std::shared_ptr<const Eigen::VectorXd> potential_;
  std::shared_ptr<const Eigen::MatrixXd> free_;
};

/// Rows are assembled in parallel; each row is summed in a fixed order so the
/// result does not depend on the thread count. The 2D lattice rule falls back
/// to point sampling.
DiscreteOperator assemble_operator(const Grid& grid, const FractionalParams& p, double c,
                                   double k = std::numeric_limits<double>::infinity(),
                                   PotentialRule rule = PotentialRule::lattice);

/// Smallest eigenvalue of a symmetric matrix.
double smallest_eigenvalue(const Eigen::MatrixXd& m);

}  // namespace hardyheat
