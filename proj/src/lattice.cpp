#include "hardyheat/lattice.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hardyheat/errors.hpp"

namespace hardyheat {

namespace {

// Direct summation radius of the lattice sums; the remainder is a series tail.
constexpr long kDirectRadius = 1L << 16;
constexpr int kTailTerms = 10;
constexpr int kNearField2d = 6;

double gk(auto&& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13);
}

double cell_integral_2d(int m1, int m2, double alpha) {
  auto inner = [&](double z1) {
    return gk([&](double z2) { return std::pow(z1 * z1 + z2 * z2, -1.0 - 0.5 * alpha); },
              m2 - 0.5, m2 + 0.5);
  };
  return gk(inner, m1 - 0.5, m1 + 0.5);
}

// int_J^inf (y - s x)^{-1-a} y^{-b} dy for s = +1 or -1 and x << J, via the
// binomial series of (1 - s x / y)^{-1-a}.
double tail_series(double x, double sign, double J, double a, double b) {
  double coeff = 1.0;  // (1+a)_k / k!
  double sum = 0.0;
  double xk = 1.0;
  for (int k = 0; k < kTailTerms; ++k) {
    sum += coeff * xk * std::pow(J, -a - b - k) / (a + b + k);
    coeff *= (1.0 + a + k) / (k + 1.0);
    xk *= sign * x;
  }
  return sum;
}

std::vector<double> compute_nu(const FractionalParams& p, double beta, std::size_t count) {
  const double a = p.alpha;
  const double A = intensity_constant(p);
  const long R = kDirectRadius + static_cast<long>(count);
  // w on positions q + 1/2 for q in [-R, R); by symmetry only |q + 1/2| matters.
  std::vector<double> w(static_cast<std::size_t>(R));  // w[j] = (j + 1/2)^{-beta}
  for (long j = 0; j < R; ++j) w[static_cast<std::size_t>(j)] = std::pow(j + 0.5, -beta);
  std::vector<double> g(static_cast<std::size_t>(2 * R + 1), 0.0);
  for (long m = 1; m <= 2 * R; ++m) g[static_cast<std::size_t>(m)] = unit_jump_weight_1d(static_cast<int>(std::min<long>(m, 1L << 30)), a);

  std::vector<double> nu(count);
  for (std::size_t pi = 0; pi < count; ++pi) {
    const long pp = static_cast<long>(pi);
    const double wp = w[pi];
    double s = 0.0;
    // Positions q + 1/2 with q in [-R, R); partner index |q + 1/2| - 1/2.
    for (long q = -R; q < R; ++q) {
      if (q == pp) continue;
      const long m = std::abs(q - pp);
      const long wi = q >= 0 ? q : -q - 1;
      s += g[static_cast<std::size_t>(m)] * (wp - w[static_cast<std::size_t>(wi)]);
    }
    // Remainder |y| > R: midpoint sum ~ integral, far weights ~ distance^{-1-a}.
    const double x = pp + 0.5;
    const double J = static_cast<double>(R);
    double tail = wp * (std::pow(J - x, -a) + std::pow(J + x, -a)) / a;
    tail -= tail_series(x, +1.0, J, a, beta) + tail_series(x, -1.0, J, a, beta);
    nu[pi] = A * (s + tail) / wp;
  }
  return nu;
}

struct CacheKey {
  int d;
  double alpha;
  double beta;
  auto operator<=>(const CacheKey&) const = default;
};

}  // namespace

double nearest_neighbour_moment_1d(double alpha) {
  return std::pow(2.0, alpha - 2.0) / (2.0 - alpha);
}

double unit_jump_weight_1d(int m, double alpha) {
  if (m < 1) throw ContractError("unit_jump_weight_1d: offset must be >= 1");
  const double dm = m;
  double w = (std::pow(dm - 0.5, -alpha) - std::pow(dm + 0.5, -alpha)) / alpha;
  if (m == 1) w += nearest_neighbour_moment_1d(alpha);
  return w;
}

double nearest_neighbour_moment_2d(double alpha) {
  // int_{cell} |z|^2 |z|^{-2-a} = 8 int_0^{pi/4} int_0^{1/(2cos t)} r^{1-a} dr dt = 2 I.
  auto f = [&](double t) { return std::pow(2.0 * std::cos(t), alpha - 2.0); };
  const double second_moment = 8.0 * gk(f, 0.0, std::numbers::pi / 4) / (2.0 - alpha);
  return 0.25 * second_moment;
}

double unit_jump_weight_2d(int m1, int m2, double alpha) {
  m1 = std::abs(m1);
  m2 = std::abs(m2);
  if (m1 == 0 && m2 == 0) throw ContractError("unit_jump_weight_2d: zero offset");
  double w;
  if (std::max(m1, m2) <= kNearField2d) {
    w = cell_integral_2d(m1, m2, alpha);
  } else {
    const double r2 = static_cast<double>(m1) * m1 + static_cast<double>(m2) * m2;
    // Midpoint plus the Laplacian correction: Delta r^{-2-a} = (2+a)^2 r^{-4-a}.
    w = std::pow(r2, -1.0 - 0.5 * alpha) * (1.0 + (2.0 + alpha) * (2.0 + alpha) / (24.0 * r2));
  }
  if (m1 + m2 == 1) w += nearest_neighbour_moment_2d(alpha);
  return w;
}

std::vector<double> lattice_harmonic_potential(const FractionalParams& p, double beta,
                                               std::size_t count) {
  p.validate();
  if (p.d != 1) throw ContractError("lattice_harmonic_potential: only d = 1 is supported");
  if (!(beta >= 0.0 && beta < p.d - p.alpha)) {
    throw ParameterDomainError("lattice_harmonic_potential: beta outside [0, d - alpha)");
  }
  static std::mutex mutex;
  static std::map<CacheKey, std::vector<double>> cache;
  const CacheKey key{p.d, p.alpha, beta};
  {
    std::lock_guard lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end() && it->second.size() >= count) {
      return {it->second.begin(), it->second.begin() + static_cast<long>(count)};
    }
  }
  auto nu = compute_nu(p, beta, count);
  std::lock_guard lock(mutex);
  auto& slot = cache[key];
  if (slot.size() < nu.size()) slot = nu;
  return nu;
}

}  // namespace hardyheat
