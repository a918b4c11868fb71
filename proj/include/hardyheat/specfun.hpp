#pragma once

#include <span>

namespace hardyheat {

/// Dimension and order of the fractional Laplacian (-Delta)^{alpha/2}.
/// Valid when d is 1, 2 or 3 and 0 < alpha < min(2, d).
struct FractionalParams {
  int d = 1;
  double alpha = 0.5;

  bool valid() const noexcept;
  /// Throws ParameterDomainError unless valid().
  void validate() const;
  /// (d - alpha) / 2, the exponent of the critical weight.
  double beta_star() const noexcept { return 0.5 * (d - alpha); }
};

struct HardyConstants {
  double intensity;  // A(d, alpha), normalisation of the jump kernel
  double c_star;     // sharp Hardy constant
};

/// A(d,a) = a Gamma((d+a)/2) / (2^{1-a} pi^{d/2} Gamma(1-a/2)).
double intensity_constant(const FractionalParams& p);

/// c*(d,a) = 2^a Gamma^2((d+a)/4) / Gamma^2((d-a)/4).
double hardy_constant(const FractionalParams& p);

HardyConstants hardy_constants(const FractionalParams& p);

/// Power-weight multiplier: (-Delta)^{a/2} |x|^{-b} = lambda(b) |x|^{-b-a},
///   lambda(b) = 2^a Gamma((a+b)/2) Gamma((d-b)/2) / (Gamma(b/2) Gamma((d-a-b)/2)),
/// for 0 < b < d - a. Symmetric under b -> d - a - b, maximal (= c*) at beta*.
double multiplier(double beta, const FractionalParams& p);

/// Unique beta in (0, beta*] with multiplier(beta) = c. Requires 0 < c <= c*.
double beta_of_c(double c, const FractionalParams& p);

/// w_c(x) = |x|^{-beta(c)}.
double weight(std::span<const double> x, double c, const FractionalParams& p);
double weight_radial(double r, double c, const FractionalParams& p);

double euclidean_norm(std::span<const double> x) noexcept;

/// Surface measure of the unit sphere S^{d-1} (2 for d = 1, 2 pi for d = 2).
double unit_sphere_area(int d);

/// Resolves the (d, alpha) constants once and answers beta(c) queries.
/// Immutable after construction; safe to share between threads.
class ExponentMap {
 public:
  explicit ExponentMap(FractionalParams p);

  const FractionalParams& params() const noexcept { return params_; }
  double intensity() const noexcept { return constants_.intensity; }
  double c_star() const noexcept { return constants_.c_star; }
  double beta_star() const noexcept { return params_.beta_star(); }

  double multiplier(double beta) const;
  double beta_of_c(double c) const;
  double weight(std::span<const double> x, double c) const;

 private:
  FractionalParams params_;
  HardyConstants constants_;
};

}  // namespace hardyheat
