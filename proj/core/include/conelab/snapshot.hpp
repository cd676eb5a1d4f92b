#pragma once

#include <filesystem>

#include "conelab/field.hpp"

namespace conelab {

/// Binary field snapshot, byte-stable across platforms.
///
/// Layout: magic "CONEW001", then the header as little-endian 64-bit values
/// (n, frame tag, points_per_axis, half_extent, rho, nu, time tag, component
/// count), then the samples as little-endian 64-bit floats, row-major within
/// each component, components in order.
struct Snapshot {
  VectorField field;
  double rho = 0.0;
  double nu = 0.0;
};

void write_snapshot(const std::filesystem::path& path, const VectorField& field,
                    double rho, double nu);

Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace conelab
