#pragma once
// Independent reference computations shared by the tests. Nothing here calls
// the library's own closed forms.

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracle {

using big = boost::multiprecision::cpp_bin_float_50;

inline big gamma50(big x) { return boost::math::tgamma(x); }

inline double intensity(int d, double alpha) {
  const big a = alpha;
  const big dd = d;
  const big pi = boost::math::constants::pi<big>();
  big v = a * gamma50((dd + a) / 2) / (pow(big(2), 1 - a) * pow(pi, dd / 2) * gamma50(1 - a / 2));
  return static_cast<double>(v);
}

inline double hardy_constant(int d, double alpha) {
  const big a = alpha;
  const big dd = d;
  const big g = gamma50((dd + a) / 4) / gamma50((dd - a) / 4);
  return static_cast<double>(pow(big(2), a) * g * g);
}

// 1D fractional Laplacian of |x|^{-beta} at x = 1 by direct quadrature of
//   A p.v. int (f(1) - f(y)) |1 - y|^{-1-a} dy
// folded around y = 1: int_0^inf [2 - (1+z)^{-b} - |1-z|^{-b}] z^{-1-a} dz.
inline double power_action_1d(double beta, double alpha) {
  auto weight = [&](double z) { return std::pow(z, -1.0 - alpha); };
  // Near z = 0 the bracket is O(z^2); expm1/log1p avoid the cancellation.
  auto near_zero = [&](double z) {
    if (z < 1e-8) return -beta * (beta + 1.0) * std::pow(z, 1.0 - alpha);
    return -(std::expm1(-beta * std::log1p(z)) + std::expm1(-beta * std::log1p(-z))) * weight(z);
  };
  // Around z = 1 use u = |1 - z| directly so that u never rounds to zero.
  auto below_one = [&](double u) {
    return (2.0 - std::pow(2.0 - u, -beta) - std::pow(u, -beta)) * weight(1.0 - u);
  };
  auto above_one = [&](double u) {
    return (2.0 - std::pow(2.0 + u, -beta) - std::pow(u, -beta)) * weight(1.0 + u);
  };
  auto far = [&](double u) {
    const double z = 2.0 + u;
    return (2.0 - std::pow(1.0 + z, -beta) - std::pow(z - 1.0, -beta)) * weight(z);
  };
  boost::math::quadrature::tanh_sinh<double> ts;
  boost::math::quadrature::exp_sinh<double> es;
  const double I = ts.integrate(near_zero, 0.0, 0.5) + ts.integrate(below_one, 0.0, 0.5) +
                   ts.integrate(above_one, 0.0, 1.0) + es.integrate(far);
  return intensity(1, alpha) * I;
}

// 1D: A int_{R \ (lo,hi)} |y|^{-beta} |x - y|^{-1-a} dy.
inline double exterior_tail_1d(double x, double beta, double lo, double hi, double alpha) {
  boost::math::quadrature::exp_sinh<double> es;
  auto right = [&](double u) { return std::pow(hi + u, -beta) * std::pow(hi + u - x, -1.0 - alpha); };
  auto left = [&](double u) { return std::pow(-lo + u, -beta) * std::pow(x - lo + u, -1.0 - alpha); };
  return intensity(1, alpha) * (es.integrate(right) + es.integrate(left));
}

}  // namespace oracle
