#include "hardyheat/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hardyheat/errors.hpp"

namespace hardyheat {

namespace {

constexpr double kDivisionTol = 1e-9;

// Rounds x to the nearest integer if it is within tolerance, else returns -1.
long exact_count(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) > kDivisionTol * std::max(1.0, std::abs(x))) return -1;
  return static_cast<long>(r);
}

}  // namespace

bool Domain::contains(std::span<const double> x) const noexcept {
  for (std::size_t k = 0; k < axes.size(); ++k) {
    if (!(x[k] > axes[k].lo && x[k] < axes[k].hi)) return false;
  }
  return true;
}

double Domain::radius() const noexcept {
  double r = std::numeric_limits<double>::infinity();
  for (const auto& ax : axes) r = std::min({r, -ax.lo, ax.hi});
  return r;
}

Domain Domain::central_box(double fraction) const {
  const double r = fraction * radius();
  Domain out;
  out.axes.assign(axes.size(), Interval{-r, r});
  return out;
}

std::string Domain::describe() const {
  std::ostringstream os;
  for (std::size_t k = 0; k < axes.size(); ++k) {
    if (k) os << " x ";
    os << "(" << axes[k].lo << "," << axes[k].hi << ")";
  }
  return os.str();
}

Grid::Grid(Domain domain, double h, std::vector<int> cells)
    : domain_(std::move(domain)), h_(h), volume_(std::pow(h, domain_.dim())), cells_(std::move(cells)) {
  const int d = domain_.dim();
  origin_offset_.resize(static_cast<std::size_t>(d));
  std::size_t n = 1;
  for (int k = 0; k < d; ++k) {
    origin_offset_[static_cast<std::size_t>(k)] =
        static_cast<int>(exact_count(-domain_.axes[static_cast<std::size_t>(k)].lo / h));
    n *= static_cast<std::size_t>(cells_[static_cast<std::size_t>(k)]);
  }
  coords_.resize(n * static_cast<std::size_t>(d));
  radii_.resize(n);
  // Row-major with axis 0 fastest.
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t rem = i;
    double r2 = 0.0;
    for (int k = 0; k < d; ++k) {
      const auto ck = static_cast<std::size_t>(cells_[static_cast<std::size_t>(k)]);
      const std::size_t m = rem % ck;
      rem /= ck;
      const double x = domain_.axes[static_cast<std::size_t>(k)].lo + (static_cast<double>(m) + 0.5) * h;
      coords_[i * static_cast<std::size_t>(d) + static_cast<std::size_t>(k)] = x;
      r2 += x * x;
    }
    radii_[i] = std::sqrt(r2);
  }
}

int Grid::cell_index(std::size_t i, int axis) const noexcept {
  std::size_t rem = i;
  for (int k = 0; k < axis; ++k) rem /= static_cast<std::size_t>(cells_[static_cast<std::size_t>(k)]);
  return static_cast<int>(rem % static_cast<std::size_t>(cells_[static_cast<std::size_t>(axis)]));
}

int Grid::lattice_index(std::size_t i, int axis) const noexcept {
  return cell_index(i, axis) - origin_offset_[static_cast<std::size_t>(axis)];
}

std::size_t Grid::flat_index(std::span<const int> cell) const noexcept {
  std::size_t idx = 0;
  std::size_t stride = 1;
  for (int k = 0; k < dim(); ++k) {
    idx += static_cast<std::size_t>(cell[static_cast<std::size_t>(k)]) * stride;
    stride *= static_cast<std::size_t>(cells_[static_cast<std::size_t>(k)]);
  }
  return idx;
}

std::size_t Grid::nearest_to_origin() const noexcept {
  return static_cast<std::size_t>(std::min_element(radii_.begin(), radii_.end()) - radii_.begin());
}

std::vector<std::size_t> Grid::nodes_in(const Domain& box) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < size(); ++i) {
    bool inside = true;
    for (int k = 0; k < dim() && inside; ++k) {
      const double x = coordinate(i, k);
      const auto& ax = box.axes[static_cast<std::size_t>(k)];
      inside = x >= ax.lo && x <= ax.hi;
    }
    if (inside) out.push_back(i);
  }
  return out;
}

double Grid::boundary_distance(std::size_t i) const noexcept {
  double dist = std::numeric_limits<double>::infinity();
  for (int k = 0; k < dim(); ++k) {
    const double x = coordinate(i, k);
    const auto& ax = domain_.axes[static_cast<std::size_t>(k)];
    dist = std::min({dist, x - ax.lo, ax.hi - x});
  }
  return dist;
}

Grid build_grid(const Domain& domain, double h) {
  if (domain.dim() < 1 || domain.dim() > 2) {
    throw ConfigError("build_grid: only 1D intervals and 2D boxes are supported");
  }
  if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("build_grid: spacing h must be positive");
  std::vector<int> cells;
  for (const auto& ax : domain.axes) {
    if (!(ax.lo < 0.0 && ax.hi > 0.0)) {
      throw ConfigError("build_grid: 0 must lie strictly inside the domain " + domain.describe());
    }
    const long count = exact_count((ax.hi - ax.lo) / h);
    if (count < 2) throw ConfigError("build_grid: h must divide the extent of " + domain.describe());
    const long below = exact_count(-ax.lo / h);
    if (below < 1) {
      throw ConfigError(
          "build_grid: 0 must fall on a cell face (-lo/h integer); otherwise a node can sit at "
          "the singular point. For symmetric domains use an even cell count");
    }
    cells.push_back(static_cast<int>(count));
  }
  return Grid(domain, h, std::move(cells));
}

}  // namespace hardyheat
