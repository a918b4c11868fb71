#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace hardyheat {

struct Interval {
  double lo;
  double hi;
};

/// Axis-aligned box in R^d (d = 1 or 2) containing the origin.
struct Domain {
  std::vector<Interval> axes;

  int dim() const noexcept { return static_cast<int>(axes.size()); }
  bool contains(std::span<const double> x) const noexcept;  // open box
  /// Radius of the largest origin-centred ball inside the box.
  double radius() const noexcept;
  /// Box {|x_k| <= fraction * radius()} used as the default compact set.
  Domain central_box(double fraction) const;
  std::string describe() const;

  static Domain interval(double lo, double hi) { return Domain{{Interval{lo, hi}}}; }
  static Domain box(Interval x, Interval y) { return Domain{{x, y}}; }
};

/// Cell-centred uniform grid. The origin sits on a cell face in every axis,
/// so no node coincides with 0 and min |x_i| >= h/2.
class Grid {
 public:
  Grid(Domain domain, double h, std::vector<int> cells);

  int dim() const noexcept { return domain_.dim(); }
  double spacing() const noexcept { return h_; }
  double cell_volume() const noexcept { return volume_; }
  std::size_t size() const noexcept { return radii_.size(); }
  const Domain& domain() const noexcept { return domain_; }
  const std::vector<int>& cells_per_axis() const noexcept { return cells_; }

  std::span<const double> node(std::size_t i) const noexcept {
    return {coords_.data() + i * static_cast<std::size_t>(dim()), static_cast<std::size_t>(dim())};
  }
  double coordinate(std::size_t i, int axis) const noexcept {
    return coords_[i * static_cast<std::size_t>(dim()) + static_cast<std::size_t>(axis)];
  }
  double radius(std::size_t i) const noexcept { return radii_[i]; }

  /// Integer lattice coordinate q of node i on an axis: x = (q + 1/2) h.
  int lattice_index(std::size_t i, int axis) const noexcept;
  /// Cell index along an axis (0 .. cells-1).
  int cell_index(std::size_t i, int axis) const noexcept;
  std::size_t flat_index(std::span<const int> cell) const noexcept;

  /// Node closest to the origin (first in storage order among ties).
  std::size_t nearest_to_origin() const noexcept;
  /// Nodes inside the closed box.
  std::vector<std::size_t> nodes_in(const Domain& box) const;
  /// Distance from node i to the domain boundary.
  double boundary_distance(std::size_t i) const noexcept;

 private:
  Domain domain_;
  double h_;
  double volume_;
  std::vector<int> cells_;
  std::vector<int> origin_offset_;  // -lo / h per axis
  std::vector<double> coords_;
  std::vector<double> radii_;
};

/// Builds the grid; throws ConfigError if h <= 0, h does not divide an axis,
/// 0 is not strictly inside, or 0 is not on a cell face (a node would sit at 0).
Grid build_grid(const Domain& domain, double h);

}  // namespace hardyheat
