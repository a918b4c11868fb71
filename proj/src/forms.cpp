#include "hardyheat/forms.hpp"

#include <cmath>
#include <vector>

#include "hardyheat/errors.hpp"
#include "hardyheat/exterior.hpp"
#include "hardyheat/lattice.hpp"

namespace hardyheat {

namespace {

// Exterior lattice tail of w at every node: continuum integral over the
// complement plus the nearest-neighbour moment weight times w at each exterior
// neighbour.
Eigen::VectorXd exterior_tail_vector(const DiscreteOperator& op, double beta) {
  const auto& grid = op.grid();
  const auto& p = op.params();
  const double h = grid.spacing();
  const double moment = intensity_constant(p) * std::pow(h, -p.alpha) *
                        (p.d == 1 ? nearest_neighbour_moment_1d(p.alpha) : nearest_neighbour_moment_2d(p.alpha));
  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::VectorXd T(n);
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto x = grid.node(static_cast<std::size_t>(i));
    double t = exterior_power_tail(x, beta, grid.domain(), p);
    for (int k = 0; k < grid.dim(); ++k) {
      const int q = grid.cell_index(static_cast<std::size_t>(i), k);
      const int last = grid.cells_per_axis()[static_cast<std::size_t>(k)] - 1;
      for (int side : {-1, 1}) {
        if ((side < 0 && q != 0) || (side > 0 && q != last)) continue;
        std::vector<double> y(x.begin(), x.end());
        y[static_cast<std::size_t>(k)] += side * h;
        t += moment * std::pow(euclidean_norm(y), -beta);
      }
    }
    T(i) = t;
  }
  return T;
}

}  // namespace

FormEvaluator::FormEvaluator(const DiscreteOperator& op) : op_(&op) {}

FormEvaluator::FormEvaluator(const DiscreteOperator& op, double c) : op_(&op) {
  const auto& map = op.exponents();
  const double beta = map.beta_of_c(c);
  weight_ = weight_vector(op.grid(), map, c);
  tail_ = exterior_tail_vector(op, beta);
}

const Eigen::VectorXd& FormEvaluator::weight() const {
  if (!weight_) throw ContractError("FormEvaluator: no weight configured");
  return *weight_;
}

const Eigen::VectorXd& FormEvaluator::exterior_tail() const {
  if (!tail_) throw ContractError("FormEvaluator: no weight configured");
  return *tail_;
}

double FormEvaluator::value(const Eigen::VectorXd& f, FormVariant variant) const {
  const auto n = static_cast<Eigen::Index>(op_->size());
  if (f.size() != n) throw ContractError("form_value: vector length does not match the grid");
  const double hd = op_->grid().cell_volume();
  switch (variant) {
    case FormVariant::plain:
      return hd * f.dot(op_->free_operator() * f);
    case FormVariant::hardy:
      return hd * f.dot(op_->apply(f));
    case FormVariant::weighted: {
      const auto& w = weight();
      const auto& J = op_->jump();
      double jump = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        double col = 0.0;
        for (Eigen::Index i = j + 1; i < n; ++i) {
          const double df = f(i) - f(j);
          col += J(i, j) * w(i) * df * df;
        }
        jump += w(j) * col;
      }
      const double ext = (f.array().square() * w.array() * tail_->array()).sum();
      return hd * (jump + ext);
    }
  }
  throw ContractError("form_value: unknown variant");
}

double form_value(const FormEvaluator& evaluator, const Eigen::VectorXd& f, FormVariant variant) {
  return evaluator.value(f, variant);
}

}  // namespace hardyheat
