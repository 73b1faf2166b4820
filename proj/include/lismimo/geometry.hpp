#pragma once

#include <cstddef>
#include <vector>

#include "lismimo/dipole.hpp"

namespace lismimo {

using PositionList = std::vector<Position>;

/// LIS element positions (on the yz-plane) and user positions, in meters.
struct Geometry {
  PositionList lis;
  PositionList ue;

  std::size_t lis_count() const { return lis.size(); }
  std::size_t ue_count() const { return ue.size(); }

  /// Throws ConfigError unless both lists are non-empty, every LIS element
  /// has x == 0, and no two positions (across both lists) coincide.
  void validate() const;
};

// Grids are endpoint-inclusive and centered at the origin, so a segment of
// length L with n points has spacing L / (n - 1).

PositionList linear_array(double length, int count);
PositionList planar_array(double len_y, double len_z, int count_y, int count_z);

/// Users on the segment x = distance_x, z = 0, |y| <= length / 2. A single
/// user sits at y = 0.
PositionList ue_line(double distance_x, double length, int count);

}  // namespace lismimo
