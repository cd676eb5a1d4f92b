#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace conelab {

/// Storage frame of a sampled field.
enum class Frame : std::int64_t { OriginalX = 0, ConeY = 1, CylinderZ = 2 };

/// Uniform rectangular grid on [-h, h)^3 with periodic convention: node i of
/// an axis sits at -h + i * (2h / N). The origin is a node (N is even).
struct GridSpec {
  int n = 3;
  int points_per_axis = 32;
  double half_extent = 1.0;

  GridSpec() = default;
  GridSpec(int dim, int points, double half);

  double spacing() const { return 2.0 * half_extent / points_per_axis; }
  std::size_t size() const {
    std::size_t s = 1;
    for (int d = 0; d < n; ++d) s *= static_cast<std::size_t>(points_per_axis);
    return s;
  }
  double coord(int i) const { return -half_extent + i * spacing(); }
  double cell_volume() const;

  /// Row-major flat index (axis 0 slowest).
  std::size_t index(int i, int j, int k) const {
    const std::size_t N = static_cast<std::size_t>(points_per_axis);
    return (static_cast<std::size_t>(i) * N + j) * N + k;
  }

  std::vector<double> axis_coords() const;

  bool operator==(const GridSpec&) const = default;
};

/// Grid covering the open cylinder section (-pi/2, pi/2)^3: the half extent is
/// shrunk by one grid cell so no node lands on the singular faces z = +-pi/2.
GridSpec cylinder_grid(int points_per_axis);

}  // namespace conelab
