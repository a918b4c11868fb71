#include "hardyheat/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "hardyheat/errors.hpp"

namespace hardyheat {

namespace {

constexpr double kRootFloor = 1e-12;

std::string describe(const FractionalParams& p) {
  return "(d=" + std::to_string(p.d) + ", alpha=" + std::to_string(p.alpha) + ")";
}

}  // namespace

bool FractionalParams::valid() const noexcept {
  if (d < 1 || d > 3) return false;
  if (!std::isfinite(alpha)) return false;
  return alpha > 0.0 && alpha < std::min(2.0, static_cast<double>(d));
}

void FractionalParams::validate() const {
  if (!valid()) {
    throw ParameterDomainError("need d in {1,2,3} and 0 < alpha < min(2,d), got " +
                               describe(*this));
  }
}

double intensity_constant(const FractionalParams& p) {
  p.validate();
  const double a = p.alpha;
  const double d = p.d;
  // log-gamma keeps the ratio accurate when Gamma(1 - a/2) is large (a -> 2).
  const double log_ratio = std::lgamma(0.5 * (d + a)) - std::lgamma(1.0 - 0.5 * a);
  return a * std::exp(log_ratio) / (std::pow(2.0, 1.0 - a) * std::pow(std::numbers::pi, 0.5 * d));
}

double hardy_constant(const FractionalParams& p) {
  p.validate();
  const double a = p.alpha;
  const double d = p.d;
  const double g = std::tgamma(0.25 * (d + a)) / std::tgamma(0.25 * (d - a));
  return std::pow(2.0, a) * g * g;
}

HardyConstants hardy_constants(const FractionalParams& p) {
  return {intensity_constant(p), hardy_constant(p)};
}

double multiplier(double beta, const FractionalParams& p) {
  p.validate();
  const double a = p.alpha;
  const double d = p.d;
  if (!(beta > 0.0 && beta < d - a)) {
    throw ParameterDomainError("multiplier: beta must lie in (0, d - alpha), got " +
                               std::to_string(beta));
  }
  // All four Gamma arguments are positive on (0, d - a).
  const double log_value = std::lgamma(0.5 * (a + beta)) + std::lgamma(0.5 * (d - beta)) -
                           std::lgamma(0.5 * beta) - std::lgamma(0.5 * (d - a - beta));
  return std::pow(2.0, a) * std::exp(log_value);
}

double beta_of_c(double c, const FractionalParams& p) {
  const double cs = hardy_constant(p);
  if (!(c > 0.0) || c > cs * (1.0 + 1e-14)) {
    throw OutOfRangeError("beta_of_c: c must lie in (0, c*] = (0, " + std::to_string(cs) +
                          "], got " + std::to_string(c));
  }
  const double bs = p.beta_star();
  if (c >= cs) return bs;

  auto residual = [&](double b) { return multiplier(b, p) - c; };
  double lo = kRootFloor;
  const double f_lo = residual(lo);
  if (f_lo >= 0.0) return lo;  // c below lambda(1e-12); beta is at the floor

  // toms748 stops on the bracket width; 200 iterations is far more than needed.
  std::uintmax_t max_iter = 200;
  auto tol = [](double x0, double x1) { return std::abs(x1 - x0) <= 4e-16 * std::max(1.0, x1); };
  auto [left, right] =
      boost::math::tools::toms748_solve(residual, lo, bs, f_lo, cs - c, tol, max_iter);
  const double r_left = std::abs(residual(left));
  const double r_right = std::abs(residual(right));
  return r_left <= r_right ? left : right;
}

double euclidean_norm(std::span<const double> x) noexcept {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double weight_radial(double r, double c, const FractionalParams& p) {
  if (!(r > 0.0)) throw SingularPointError("weight: w_c is singular at x = 0");
  return std::pow(r, -beta_of_c(c, p));
}

double weight(std::span<const double> x, double c, const FractionalParams& p) {
  return weight_radial(euclidean_norm(x), c, p);
}

double unit_sphere_area(int d) {
  switch (d) {
    case 1: return 2.0;
    case 2: return 2.0 * std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi;
    default: throw ParameterDomainError("unit_sphere_area: d must be 1, 2 or 3");
  }
}

ExponentMap::ExponentMap(FractionalParams p) : params_(p), constants_(hardy_constants(p)) {}

double ExponentMap::multiplier(double beta) const {
  return hardyheat::multiplier(beta, params_);
}

double ExponentMap::beta_of_c(double c) const { return hardyheat::beta_of_c(c, params_); }

double ExponentMap::weight(std::span<const double> x, double c) const {
  const double r = euclidean_norm(x);
  if (!(r > 0.0)) throw SingularPointError("weight: w_c is singular at x = 0");
  return std::pow(r, -beta_of_c(c));
}

}  // namespace hardyheat
