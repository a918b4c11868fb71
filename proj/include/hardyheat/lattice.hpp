#pragma once

#include <vector>

#include "hardyheat/specfun.hpp"

namespace hardyheat {

/// Jump weight between cells m apart on the unit 1D lattice, without the
/// factor A(1,a): the exact cell integral int_{m-1/2}^{m+1/2} z^{-1-a} dz plus,
/// for m = 1, the own-cell second-moment correction nearest_neighbour_moment_1d.
double unit_jump_weight_1d(int m, double alpha);

/// 2^{a-2} / (2 - a): own-cell moment int_{|z|<1/2} z^2 |z|^{-1-a} dz / 2,
/// folded into the two nearest-neighbour weights.
double nearest_neighbour_moment_1d(double alpha);

/// Unit-lattice 2D weight for cell offset (m1, m2) != (0, 0), without A(2,a):
/// int over the offset cell of |z|^{-2-a} (quadrature near the origin,
/// corrected midpoint further out) plus the own-cell moment for |m| = 1.
double unit_jump_weight_2d(int m1, int m2, double alpha);

/// I/2 with I = int_{[-1/2,1/2]^2} z_1^2 |z|^{-2-a} dz.
double nearest_neighbour_moment_2d(double alpha);

/// Lattice-harmonic Hardy potential on the unit 1D lattice x_p = p + 1/2:
/// nu(p) = (L w)(x_p) / w(x_p) for w = |x|^{-beta}, where L is the infinite-
/// lattice operator built from A * unit_jump_weight_1d. On a grid of spacing h
/// the potential at a node with |x| = (p + 1/2) h is h^{-a} nu(p).
/// Results are memoised per (alpha, beta) and extended on demand; thread safe.
std::vector<double> lattice_harmonic_potential(const FractionalParams& p, double beta,
                                               std::size_t count);

}  // namespace hardyheat
