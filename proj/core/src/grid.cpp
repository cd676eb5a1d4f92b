#include "conelab/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace conelab {

GridSpec::GridSpec(int dim, int points, double half)
    : n(dim), points_per_axis(points), half_extent(half) {
  if (dim != 3)
    throw std::invalid_argument("GridSpec: sampled fields support n = 3 only, got " +
                                std::to_string(dim));
  if (points < 16 || (points & (points - 1)) != 0)
    throw std::invalid_argument(
        "GridSpec: points_per_axis must be a power of two >= 16");
  if (!(half > 0.0)) throw std::invalid_argument("GridSpec: half_extent must be positive");
}

double GridSpec::cell_volume() const {
  double v = 1.0;
  for (int d = 0; d < n; ++d) v *= spacing();
  return v;
}

std::vector<double> GridSpec::axis_coords() const {
  std::vector<double> xs(points_per_axis);
  for (int i = 0; i < points_per_axis; ++i) xs[i] = coord(i);
  return xs;
}

GridSpec cylinder_grid(int points_per_axis) {
  const double h =
      (std::numbers::pi / 2.0) * (1.0 - 1.0 / static_cast<double>(points_per_axis));
  return GridSpec(3, points_per_axis, h);
}

}  // namespace conelab
