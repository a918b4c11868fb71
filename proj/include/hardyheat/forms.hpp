#pragma once

#include <optional>

#include <Eigen/Dense>

#include "hardyheat/operator.hpp"

namespace hardyheat {

enum class FormVariant { plain, hardy, weighted };

/// Quadratic forms of a DiscreteOperator, all on the h^d scale:
///   plain     h^d f.L0.f
///   hardy     plain - h^d sum f_i^2 min(V_i, k)
///   weighted  h^d [ 1/2 sum J_ij w_i w_j (f_i - f_j)^2 + sum f_i^2 w_i T_i ]
/// where T_i = sum over exterior lattice cells y of J(x_i, y) w(y), i.e. the
/// exterior power tail plus the moment term of exterior nearest neighbours.
/// With that tail, hardy(w f) - weighted(f) = h^d sum f_i^2 w_i r_i where r is
/// the discrete-harmonicity defect of w.
class FormEvaluator {
 public:
  explicit FormEvaluator(const DiscreteOperator& op);
  /// Enables the weighted variant for the weight w_c with 0 < c <= c*.
  FormEvaluator(const DiscreteOperator& op, double c);

  const DiscreteOperator& op() const noexcept { return *op_; }
  bool has_weight() const noexcept { return weight_.has_value(); }
  const Eigen::VectorXd& weight() const;
  const Eigen::VectorXd& exterior_tail() const;

  double value(const Eigen::VectorXd& f, FormVariant variant) const;

 private:
  const DiscreteOperator* op_;
  std::optional<Eigen::VectorXd> weight_;
  std::optional<Eigen::VectorXd> tail_;
};

double form_value(const FormEvaluator& evaluator, const Eigen::VectorXd& f, FormVariant variant);

}  // namespace hardyheat
