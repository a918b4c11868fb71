#include "hardyheat/exterior.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hardyheat/errors.hpp"

namespace hardyheat {

namespace {

constexpr double kAngularTol = 1e-10;

void require_inside(std::span<const double> x, const Domain& domain) {
  if (!domain.contains(x)) {
    throw SingularPointError("exterior integrals are infinite on or outside the boundary");
  }
}

// Distance from x to the box boundary along the unit direction (cos t, sin t).
double ray_length(std::span<const double> x, const Domain& box, double t) {
  const double dir[2] = {std::cos(t), std::sin(t)};
  double rho = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 2; ++k) {
    const auto& ax = box.axes[static_cast<std::size_t>(k)];
    if (dir[k] > 0.0) rho = std::min(rho, (ax.hi - x[k]) / dir[k]);
    if (dir[k] < 0.0) rho = std::min(rho, (ax.lo - x[k]) / dir[k]);
  }
  return rho;
}

// Angular breakpoints (corner directions) sorted on [theta0, theta0 + 2 pi].
std::vector<double> corner_angles(std::span<const double> x, const Domain& box) {
  std::vector<double> angles;
  for (double cx : {box.axes[0].lo, box.axes[0].hi}) {
    for (double cy : {box.axes[1].lo, box.axes[1].hi}) {
      double t = std::atan2(cy - x[1], cx - x[0]);
      if (t < 0.0) t += 2.0 * std::numbers::pi;
      angles.push_back(t);
    }
  }
  std::sort(angles.begin(), angles.end());
  angles.push_back(angles.front() + 2.0 * std::numbers::pi);
  return angles;
}

template <class F>
double integrate_angles(std::span<const double> x, const Domain& box, F&& f) {
  using boost::math::quadrature::gauss_kronrod;
  const auto angles = corner_angles(x, box);
  double total = 0.0;
  for (std::size_t s = 0; s + 1 < angles.size(); ++s) {
    total += gauss_kronrod<double, 61>::integrate(f, angles[s], angles[s + 1], 12, kAngularTol);
  }
  return total;
}

// int_0^inf (base + z)^{-beta} (gap + z)^{-1-a} dz, both shifts positive.
double half_line_tail(double base, double gap, double beta, double a) {
  if (beta == 0.0) return std::pow(gap, -a) / a;
  boost::math::quadrature::exp_sinh<double> integrator;
  auto f = [&](double z) { return std::pow(base + z, -beta) * std::pow(gap + z, -1.0 - a); };
  return integrator.integrate(f);
}

}  // namespace

double killing_term(std::span<const double> x, const Domain& domain, const FractionalParams& p) {
  p.validate();
  if (static_cast<int>(x.size()) != domain.dim() || domain.dim() != p.d) {
    throw ContractError("killing_term: dimension mismatch");
  }
  require_inside(x, domain);
  const double A = intensity_constant(p);
  const double a = p.alpha;
  if (domain.dim() == 1) {
    const auto& ax = domain.axes[0];
    return (A / a) * (std::pow(x[0] - ax.lo, -a) + std::pow(ax.hi - x[0], -a));
  }
  if (domain.dim() == 2) {
    auto f = [&](double t) { return std::pow(ray_length(x, domain, t), -a); };
    return (A / a) * integrate_angles(x, domain, f);
  }
  throw ContractError("killing_term: only d = 1, 2 are supported");
}

double exterior_power_tail(std::span<const double> x, double beta, const Domain& domain,
                           const FractionalParams& p) {
  if (beta == 0.0) return killing_term(x, domain, p);
  p.validate();
  if (static_cast<int>(x.size()) != domain.dim() || domain.dim() != p.d) {
    throw ContractError("exterior_power_tail: dimension mismatch");
  }
  require_inside(x, domain);
  const double A = intensity_constant(p);
  const double a = p.alpha;
  if (domain.dim() == 1) {
    const auto& ax = domain.axes[0];
    // Right: y = hi + z, |y| = hi + z. Left: y = lo - z, |y| = -lo + z.
    return A * (half_line_tail(ax.hi, ax.hi - x[0], beta, a) +
                half_line_tail(-ax.lo, x[0] - ax.lo, beta, a));
  }
  if (domain.dim() == 2) {
    auto f = [&](double t) {
      const double rho = ray_length(x, domain, t);
      const double ct = std::cos(t);
      const double st = std::sin(t);
      boost::math::quadrature::exp_sinh<double> integrator;
      auto radial = [&](double z) {
        const double r = rho + z;
        const double y0 = x[0] + r * ct;
        const double y1 = x[1] + r * st;
        return std::pow(y0 * y0 + y1 * y1, -0.5 * beta) * std::pow(r, -1.0 - a);
      };
      return integrator.integrate(radial);
    };
    return A * integrate_angles(x, domain, f);
  }
  throw ContractError("exterior_power_tail: only d = 1, 2 are supported");
}

}  // namespace hardyheat
