#pragma once

#include <span>

#include "hardyheat/grid.hpp"
#include "hardyheat/specfun.hpp"

namespace hardyheat {

/// kappa_Omega(x) = A(d,a) int_{Omega^c} |x-y|^{-d-a} dy, the killing rate.
/// 1D closed form (A/a)[(x-lo)^{-a} + (hi-x)^{-a}]; 2D by polar quadrature
/// (A/a) int rho(theta)^{-a} dtheta with relative error <= 1e-8.
/// Throws SingularPointError for x on or outside the boundary.
double killing_term(std::span<const double> x, const Domain& domain, const FractionalParams& p);

/// A(d,a) int_{Omega^c} |y|^{-beta} |x-y|^{-d-a} dy: the exterior tail of the
/// power weight seen from x. beta = 0 reduces to killing_term.
double exterior_power_tail(std::span<const double> x, double beta, const Domain& domain,
                           const FractionalParams& p);

}  // namespace hardyheat
