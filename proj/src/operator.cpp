#include "hardyheat/operator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "hardyheat/errors.hpp"
#include "hardyheat/exterior.hpp"
#include "hardyheat/lattice.hpp"

namespace hardyheat {

namespace {

// |x| = (p + 1/2) h on the lattice; p = q for q >= 0 and -q - 1 otherwise.
int lattice_shell(int q) { return q >= 0 ? q : -q - 1; }

Eigen::MatrixXd jump_1d(const Grid& grid, const FractionalParams& p) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  const double scale = intensity_constant(p) * std::pow(grid.spacing(), -p.alpha);
  Eigen::VectorXd g(n);
  g(0) = 0.0;
  for (Eigen::Index m = 1; m < n; ++m) g(m) = scale * unit_jump_weight_1d(static_cast<int>(m), p.alpha);
  Eigen::MatrixXd J(n, n);
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) J(i, j) = g(std::abs(i - j));
  }
  return J;
}

Eigen::MatrixXd jump_2d(const Grid& grid, const FractionalParams& p) {
  const int n0 = grid.cells_per_axis()[0];
  const int n1 = grid.cells_per_axis()[1];
  const double scale = intensity_constant(p) * std::pow(grid.spacing(), -p.alpha);
  Eigen::MatrixXd table(n0, n1);
#pragma omp parallel for schedule(dynamic)
  for (int a = 0; a < n0; ++a) {
    for (int b = 0; b < n1; ++b) {
      table(a, b) = (a == 0 && b == 0) ? 0.0 : scale * unit_jump_weight_2d(a, b, p.alpha);
    }
  }
  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd J(n, n);
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < n; ++j) {
    const int ja = static_cast<int>(j % n0);
    const int jb = static_cast<int>(j / n0);
    for (Eigen::Index i = 0; i < n; ++i) {
      J(i, j) = table(std::abs(static_cast<int>(i % n0) - ja), std::abs(static_cast<int>(i / n0) - jb));
    }
  }
  return J;
}

// Number of nearest lattice neighbours of node i that lie outside the domain.
int exterior_neighbours(const Grid& grid, std::size_t i) {
  int count = 0;
  for (int k = 0; k < grid.dim(); ++k) {
    const int q = grid.cell_index(i, k);
    if (q == 0) ++count;
    if (q == grid.cells_per_axis()[static_cast<std::size_t>(k)] - 1) ++count;
  }
  return count;
}

}  // namespace

const char* to_string(PotentialRule rule) noexcept {
  return rule == PotentialRule::lattice ? "lattice" : "point";
}

PotentialRule potential_rule_from_string(const std::string& name) {
  if (name == "lattice") return PotentialRule::lattice;
  if (name == "point") return PotentialRule::point;
  throw ConfigError("unknown potential rule '" + name + "' (expected lattice or point)");
}

Eigen::VectorXd hardy_potential(const Grid& grid, const ExponentMap& map, double c,
                                PotentialRule rule) {
  const auto& p = map.params();
  if (c < 0.0) throw ParameterDomainError("hardy_potential: c must be nonnegative");
  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::VectorXd V = Eigen::VectorXd::Zero(n);
  if (c == 0.0) return V;
  if (rule == PotentialRule::point || p.d != 1) {
    for (Eigen::Index i = 0; i < n; ++i) V(i) = c * std::pow(grid.radius(static_cast<std::size_t>(i)), -p.alpha);
    return V;
  }
  const double cs = map.c_star();
  const double beta = c >= cs ? map.beta_star() : map.beta_of_c(c);
  const double factor = c > cs ? c / cs : 1.0;
  int shells = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    shells = std::max(shells, lattice_shell(grid.lattice_index(static_cast<std::size_t>(i), 0)) + 1);
  }
  const auto nu = lattice_harmonic_potential(p, beta, static_cast<std::size_t>(shells));
  const double scale = factor * std::pow(grid.spacing(), -p.alpha);
  for (Eigen::Index i = 0; i < n; ++i) {
    V(i) = scale * nu[static_cast<std::size_t>(lattice_shell(grid.lattice_index(static_cast<std::size_t>(i), 0)))];
  }
  return V;
}

Eigen::VectorXd weight_vector(const Grid& grid, const ExponentMap& map, double c) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  if (c == 0.0) return Eigen::VectorXd::Ones(n);
  const double beta = map.beta_of_c(c);
  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) w(i) = std::pow(grid.radius(static_cast<std::size_t>(i)), -beta);
  return w;
}

Eigen::VectorXd DiscreteOperator::truncated_potential() const {
  return potential_->cwiseMin(k_);
}

Eigen::MatrixXd DiscreteOperator::hamiltonian() const {
  Eigen::MatrixXd H = *free_;
  H.diagonal() -= truncated_potential();
  return H;
}

Eigen::VectorXd DiscreteOperator::apply(const Eigen::VectorXd& x) const {
  if (x.size() != static_cast<Eigen::Index>(size())) throw ContractError("apply: size mismatch");
  return *free_ * x - truncated_potential().cwiseProduct(x);
}

DiscreteOperator DiscreteOperator::with_truncation(double k) const {
  if (!(k > 0.0)) throw ParameterDomainError("truncation level k must be positive");
  DiscreteOperator out = *this;
  out.k_ = k;
  return out;
}

DiscreteOperator assemble_operator(const Grid& grid, const FractionalParams& p, double c, double k,
                                   PotentialRule rule) {
  p.validate();
  if (p.d != grid.dim()) throw ContractError("assemble_operator: grid and params dimensions differ");
  if (c < 0.0) throw ParameterDomainError("assemble_operator: c must be nonnegative");
  if (!(k > 0.0)) throw ParameterDomainError("assemble_operator: k must be positive");
  if (p.d == 2 && rule == PotentialRule::lattice) rule = PotentialRule::point;

  DiscreteOperator op(p);
  op.grid_ = std::make_shared<const Grid>(grid);
  op.c_ = c;
  op.k_ = k;
  op.rule_ = rule;

  auto J = std::make_shared<Eigen::MatrixXd>(p.d == 1 ? jump_1d(grid, p) : jump_2d(grid, p));
  const auto n = static_cast<Eigen::Index>(grid.size());
  const double A = intensity_constant(p);
  const double moment = A * std::pow(grid.spacing(), -p.alpha) *
                        (p.d == 1 ? nearest_neighbour_moment_1d(p.alpha) : nearest_neighbour_moment_2d(p.alpha));
  auto kappa = std::make_shared<Eigen::VectorXd>(n);
  auto bnd = std::make_shared<Eigen::VectorXd>(n);
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto node = grid.node(static_cast<std::size_t>(i));
    (*kappa)(i) = killing_term(node, grid.domain(), p);
    (*bnd)(i) = moment * exterior_neighbours(grid, static_cast<std::size_t>(i));
  }

  auto L0 = std::make_shared<Eigen::MatrixXd>(-*J);
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) row += (*J)(j, i);  // J symmetric; column walk is contiguous
    (*L0)(i, i) = row + (*kappa)(i) + (*bnd)(i);
  }

  op.potential_ = std::make_shared<const Eigen::VectorXd>(hardy_potential(grid, op.map_, c, rule));
  op.jump_ = std::move(J);
  op.killing_ = std::move(kappa);
  op.boundary_ = std::move(bnd);
  op.free_ = std::move(L0);
  return op;
}

double smallest_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw InvariantViolation("eigenvalue solver did not converge");
  return es.eigenvalues()(0);
}

}  // namespace hardyheat
