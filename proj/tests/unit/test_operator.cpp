#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "../support/oracles.hpp"
#include "hardyheat/errors.hpp"
#include "hardyheat/exterior.hpp"
#include "hardyheat/forms.hpp"
#include "hardyheat/lattice.hpp"
#include "hardyheat/operator.hpp"

using namespace hardyheat;

namespace {

const FractionalParams kP{1, 0.5};

double cstar() { return oracle::hardy_constant(1, 0.5); }

}  // namespace

TEST(LatticeWeights, CellIntegralsSumToKillingOnFarCells) {
  // Sum of cell integrals beyond m equals the tail integral (m+1/2)^{-a}/a.
  double s = 0.0;
  for (int m = 5; m < 200000; ++m) s += unit_jump_weight_1d(m, 0.5);
  EXPECT_NEAR(s, (std::pow(4.5, -0.5) - std::pow(199999.5, -0.5)) / 0.5, 1e-10);
}

TEST(LatticeWeights, MomentMatchesQuadrature) {
  for (double a : {0.3, 0.5, 1.2}) {
    // int_{-1/2}^{1/2} z^2 |z|^{-1-a} dz / 2 = (1/2)^{2-a}/(2-a)
    EXPECT_NEAR(nearest_neighbour_moment_1d(a), std::pow(0.5, 2 - a) / (2 - a), 1e-15);
  }
  // 2D: compare with a Cartesian product rule on a fine midpoint grid with the
  // singular corner handled by symmetry.
  const double a = 0.8;
  const int m = 2000;
  double s = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const double x = (i + 0.5) / (2.0 * m), y = (j + 0.5) / (2.0 * m);
      s += x * x * std::pow(x * x + y * y, -1.0 - 0.5 * a);
    }
  }
  s *= 4.0 / (4.0 * m * m);  // four quadrants, cell area (1/(2m))^2
  EXPECT_NEAR(nearest_neighbour_moment_2d(a), 0.5 * s, 2e-3 * s);
}

TEST(LatticeWeights, TwoDimensionalFarFieldContinuous) {
  // Near-field quadrature and corrected midpoint agree at the switch-over.
  for (double a : {0.5, 1.0, 1.5}) {
    const double inner = unit_jump_weight_2d(6, 3, a);
    const double r2 = 45.0;
    const double mid = std::pow(r2, -1 - 0.5 * a) * (1 + (2 + a) * (2 + a) / (24 * r2));
    EXPECT_NEAR(inner, mid, 2e-4 * inner);
    EXPECT_DOUBLE_EQ(unit_jump_weight_2d(-3, 7, a), unit_jump_weight_2d(3, 7, a));
  }
}

TEST(Operator, SymmetricPositiveDefinite) {
  for (double h : {0.25, 0.05}) {
    const auto g = build_grid(Domain::interval(-1, 1), h);
    const auto op = assemble_operator(g, kP, 0.0);
    const auto& L = op.free_operator();
    EXPECT_EQ((L - L.transpose()).cwiseAbs().maxCoeff(), 0.0);
    for (Eigen::Index i = 0; i < L.rows(); ++i) {
      for (Eigen::Index j = 0; j < L.cols(); ++j) {
        if (i != j) EXPECT_LE(L(i, j), 0.0);
      }
    }
    const Eigen::VectorXd rows = L.rowwise().sum();
    const Eigen::VectorXd mass = op.killing() + op.boundary_correction();
    EXPECT_LT((rows - mass).cwiseAbs().maxCoeff(), 1e-10 * mass.maxCoeff());
    EXPECT_GT(smallest_eigenvalue(L), 0.0);
    EXPECT_EQ(smallest_eigenvalue(op.hamiltonian()), smallest_eigenvalue(L));
  }
  const auto g2 = build_grid(Domain::box({-1, 1}, {-1, 1}), 0.125);
  const auto op2 = assemble_operator(g2, {2, 1.0}, 0.0);
  EXPECT_EQ((op2.jump() - op2.jump().transpose()).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_GT(smallest_eigenvalue(op2.free_operator()), 0.0);
}

TEST(Operator, PotentialTruncationAndMonotonicity) {
  const auto g = build_grid(Domain::interval(-1, 1), 0.02);
  double prev = INFINITY;
  for (double f : {0.25, 0.5, 0.9, 1.0}) {
    const auto op = assemble_operator(g, kP, f * cstar());
    const double lmin = smallest_eigenvalue(op.hamiltonian());
    EXPECT_LT(lmin, prev);
    EXPECT_GT(lmin, 0.0);
    prev = lmin;
    const auto cut = op.with_truncation(5.0);
    EXPECT_LE(cut.truncated_potential().maxCoeff(), 5.0);
    EXPECT_EQ(cut.potential(), op.potential());
  }
  EXPECT_THROW(assemble_operator(g, kP, -1.0), ParameterDomainError);
  EXPECT_THROW(assemble_operator(g, kP, 0.1, 0.0), ParameterDomainError);
}

TEST(Operator, LatticePotentialTendsToPointPotential) {
  // Away from the origin the lattice potential approaches c|x|^{-a}; the
  // relative gap at fixed x shrinks under refinement.
  const ExponentMap map(kP);
  for (double f : {0.5, 1.0, 2.0}) {
    const double c = f * cstar();
    double prev = INFINITY;
    for (double h : {0.01, 0.005, 0.0025}) {
      const auto g = build_grid(Domain::interval(-1, 1), h);
      const auto lat = hardy_potential(g, map, c, PotentialRule::lattice);
      const auto pt = hardy_potential(g, map, c, PotentialRule::point);
      double gap = 0.0;
      for (Eigen::Index i = 0; i < lat.size(); ++i) {
        if (g.radius(static_cast<std::size_t>(i)) > 0.25) gap = std::max(gap, std::abs(lat(i) / pt(i) - 1));
      }
      EXPECT_LT(gap, 0.05);
      EXPECT_LT(gap, prev / 1.5);
      prev = gap;
    }
  }
}

TEST(Operator, LatticePotentialMakesWeightHarmonicOnLattice) {
  // Direct check of nu(p) against a brute-force lattice sum for small p.
  const double beta = 0.2;
  const auto nu = lattice_harmonic_potential(kP, beta, 4);
  const double A = oracle::intensity(1, 0.5);
  const long R = 1L << 22;
  for (int p = 0; p < 4; ++p) {
    const double xp = p + 0.5;
    long double s = 0.0;
    for (long q = -R; q < R; ++q) {
      if (q == p) continue;
      s += unit_jump_weight_1d(static_cast<int>(std::labs(q - p)), 0.5) *
           (std::pow(xp, -beta) - std::pow(std::fabs(q + 0.5), -beta));
    }
    // Remaining tail of the sum is O(R^{-a}) times w(x_p); include it analytically.
    const double tail = std::pow(xp, -beta) * 2 * std::pow(static_cast<double>(R), -0.5) / 0.5 -
                        2 * std::pow(static_cast<double>(R), -0.5 - beta) / (0.5 + beta);
    EXPECT_NEAR(nu[p], A * (static_cast<double>(s) + tail) / std::pow(xp, -beta), 1e-6 * nu[p]);
  }
}

TEST(Operator, HarmonicityDefectShrinks) {
  const double c = 0.5 * cstar();
  const ExponentMap map(kP);
  const double beta = map.beta_of_c(c);
  const double lam = multiplier(beta, kP);
  double prev = INFINITY;
  for (double h : {0.02, 0.01, 0.005}) {
    const auto g = build_grid(Domain::interval(-1, 1), h);
    const auto op = assemble_operator(g, kP, 0.0);
    const auto w = weight_vector(g, map, c);
    const Eigen::VectorXd Lw = op.free_operator() * w;
    double defect = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = g.coordinate(i, 0);
      if (std::abs(x) < 0.25 || g.boundary_distance(i) < 0.25) continue;
      const double xs[1] = {x};
      const double expect = lam * std::pow(std::abs(x), -beta - 0.5) +
                            oracle::exterior_tail_1d(x, beta, -1, 1, 0.5);
      defect = std::max(defect, std::abs(Lw(static_cast<Eigen::Index>(i)) - expect) / expect);
      (void)xs;
    }
    EXPECT_LT(defect, prev / 1.5);
    prev = defect;
  }
}

TEST(Operator, NestedDomainsDominate) {
  // The operator on a subdomain is a principal submatrix minus nothing: the
  // bigger domain's L0 restricted to the smaller grid has smaller diagonal.
  const auto big = build_grid(Domain::interval(-1, 1), 0.05);
  const auto small = build_grid(Domain::interval(-0.5, 0.5), 0.05);
  const auto L = assemble_operator(big, kP, 0.0).free_operator();
  const auto S = assemble_operator(small, kP, 0.0).free_operator();
  const Eigen::Index off = 10;
  for (Eigen::Index i = 0; i < S.rows(); ++i) {
    for (Eigen::Index j = 0; j < S.cols(); ++j) {
      if (i == j) {
        EXPECT_GE(S(i, j), L(i + off, j + off) - 1e-12);
      } else {
        EXPECT_NEAR(S(i, j), L(i + off, j + off), 1e-12);
      }
    }
  }
}

TEST(Forms, PlainFormOfConstantIsRowMass) {
  const auto g = build_grid(Domain::interval(-1, 1), 0.05);
  const auto op = assemble_operator(g, kP, 0.5 * cstar());
  const FormEvaluator fe(op);
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(g.size()));
  const double expect = g.cell_volume() * (op.killing() + op.boundary_correction()).sum();
  EXPECT_NEAR(form_value(fe, one, FormVariant::plain), expect, 1e-10 * expect);
  EXPECT_NEAR(form_value(fe, one, FormVariant::hardy),
              expect - g.cell_volume() * op.potential().sum(), 1e-10 * expect);
  EXPECT_THROW(form_value(fe, one, FormVariant::weighted), ContractError);
  EXPECT_THROW(form_value(fe, Eigen::VectorXd::Ones(3), FormVariant::plain), ContractError);
}

TEST(Forms, HardyInequalityOnRandomVectors) {
  const auto g = build_grid(Domain::interval(-1, 1), 0.02);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> N;
  for (double f : {0.25, 0.5, 0.9, 1.0}) {
    const auto op = assemble_operator(g, kP, f * cstar());
    const FormEvaluator fe(op);
    for (int s = 0; s < 10; ++s) {
      Eigen::VectorXd v(static_cast<Eigen::Index>(g.size()));
      for (auto& x : v) x = N(rng);
      const double plain = form_value(fe, v, FormVariant::plain);
      const double hardy = form_value(fe, v, FormVariant::hardy);
      EXPECT_GE(hardy, (1 - f) * plain - 1e-9 * plain);
    }
  }
}

TEST(Forms, GroundStateIdentityExactOnSupportFarFromBoundary) {
  const double c = 0.5 * cstar();
  double prev = INFINITY;
  for (double h : {0.02, 0.01}) {
    const auto g = build_grid(Domain::interval(-1, 1), h);
    const auto op = assemble_operator(g, kP, c);
    const FormEvaluator fe(op, c);
    Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.size()));
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = g.coordinate(i, 0);
      if (std::abs(x) < 0.5) f(static_cast<Eigen::Index>(i)) = std::pow(std::cos(std::numbers::pi * x), 2);
    }
    const Eigen::VectorXd wf = f.cwiseProduct(fe.weight());
    const double q = form_value(fe, f, FormVariant::weighted);
    const double defect = std::abs(form_value(fe, wf, FormVariant::hardy) - q) / std::max(1.0, q);
    EXPECT_LT(defect, 1e-3);
    EXPECT_LT(defect, 0.7 * prev);
    prev = defect;
  }
}
