#include "lismimo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "lismimo/errors.hpp"

namespace lismimo {
namespace {

// Symmetric about zero by construction: point i and point n-1-i are exact
// negatives of each other.
std::vector<double> centered_grid(double length, int count) {
  std::vector<double> pts(static_cast<std::size_t>(count));
  if (count == 1) {
    pts[0] = 0.0;
    return pts;
  }
  const double spacing = length / (count - 1);
  for (int i = 0; i < count; ++i) {
    const int mirrored = count - 1 - i;
    if (i < mirrored) {
      pts[i] = -0.5 * length + i * spacing;
    } else if (i == mirrored) {
      pts[i] = 0.0;
    } else {
      pts[i] = -pts[mirrored];
    }
  }
  return pts;
}

void check_length(double length, const char* what) {
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw ConfigError(std::string(what) + " must be finite and positive");
  }
}

void check_unique(PositionList sorted, const char* what) {
  auto key = [](const Position& p) { return std::tie(p.x, p.y, p.z); };
  std::sort(sorted.begin(), sorted.end(),
            [&](const Position& a, const Position& b) { return key(a) < key(b); });
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ConfigError(std::string("coincident positions in ") + what);
  }
}

}  // namespace

void Geometry::validate() const {
  if (lis.empty()) throw ConfigError("geometry has no LIS elements");
  if (ue.empty()) throw ConfigError("geometry has no users");
  for (const auto& p : lis) {
    if (p.x != 0.0) throw ConfigError("LIS elements must lie on the yz-plane (x = 0)");
  }
  for (const auto* list : {&lis, &ue}) {
    for (const auto& p : *list) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
        throw ConfigError("non-finite position");
      }
    }
  }
  check_unique(lis, "LIS array");
  check_unique(ue, "user set");
  PositionList all = lis;
  all.insert(all.end(), ue.begin(), ue.end());
  check_unique(std::move(all), "LIS and user sets");
}

PositionList linear_array(double length, int count) {
  if (count < 2) throw ConfigError("linear array needs at least 2 elements");
  check_length(length, "array length");
  PositionList out;
  out.reserve(static_cast<std::size_t>(count));
  for (double y : centered_grid(length, count)) out.push_back({0.0, y, 0.0});
  return out;
}

PositionList planar_array(double len_y, double len_z, int count_y, int count_z) {
  if (count_y < 2 || count_z < 2) {
    throw ConfigError("planar array needs at least 2 elements per axis");
  }
  check_length(len_y, "array length along y");
  check_length(len_z, "array length along z");
  const auto ys = centered_grid(len_y, count_y);
  const auto zs = centered_grid(len_z, count_z);
  PositionList out;
  out.reserve(ys.size() * zs.size());
  for (double y : ys) {
    for (double z : zs) out.push_back({0.0, y, z});
  }
  return out;
}

PositionList ue_line(double distance_x, double length, int count) {
  if (count < 1) throw ConfigError("user line needs at least 1 user");
  check_length(distance_x, "user distance");
  if (!(length >= 0.0) || !std::isfinite(length)) {
    throw ConfigError("user line length must be finite and non-negative");
  }
  if (count > 1 && !(length > 0.0)) {
    throw ConfigError("user line of zero length cannot hold more than one user");
  }
  PositionList out;
  out.reserve(static_cast<std::size_t>(count));
  for (double y : centered_grid(length, count)) out.push_back({distance_x, y, 0.0});
  return out;
}

}  // namespace lismimo
