#pragma once

#include <cmath>

#include "lismimo/types.hpp"

namespace lismimo {

/// Cartesian separation or position vector, in meters.
struct Position {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }

  friend Position operator-(const Position& a, const Position& b) {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
  }
  friend Position operator-(const Position& a) { return {-a.x, -a.y, -a.z}; }
  friend bool operator==(const Position&, const Position&) = default;
};

/// Free-space and dipole constants shared by every impedance evaluation.
///
/// The dipole length defaults to the value that makes the radiation
/// resistance of an isolated element exactly one ohm, l = sqrt(3 lambda / (k eta)).
class PhysicalConfig {
 public:
  static constexpr double kFreeSpaceImpedance = 376.730313668;

  explicit PhysicalConfig(double wavelength = 1.0);
  PhysicalConfig(double wavelength, double dipole_length);

  double wavelength() const { return wavelength_; }
  double wavenumber() const { return wavenumber_; }
  double impedance() const { return kFreeSpaceImpedance; }
  double dipole_length() const { return dipole_length_; }

  /// Radiation resistance of an isolated element, k l^2 eta / (3 lambda).
  double self_resistance() const;

 private:
  double wavelength_;
  double wavenumber_;
  double dipole_length_;
};

/// Mutual impedance between two parallel z-oriented short dipoles separated
/// by `r`. Throws ConfigError for a zero separation, where the reactance is
/// singular.
Complex mutual_impedance(const Position& r, const PhysicalConfig& phys);

/// Re{z0}, the r -> 0 limit of Re{mutual_impedance}.
double self_impedance_real(const PhysicalConfig& phys);

}  // namespace lismimo
