#include "lismimo/dipole.hpp"

#include <numbers>
#include <string>

#include "lismimo/errors.hpp"

namespace lismimo {
namespace {

// j1(u)/u = (sin u - u cos u) / u^3. The direct form cancels badly for small
// u, which matters because Re{z} must approach Re{z0} smoothly.
double j1_over_u(double u) {
  if (u < 1e-2) {
    const double u2 = u * u;
    return 1.0 / 3.0 - u2 / 30.0 + u2 * u2 / 840.0 - u2 * u2 * u2 / 45360.0;
  }
  return (std::sin(u) - u * std::cos(u)) / (u * u * u);
}

double sinc(double u) { return u < 1e-8 ? 1.0 - u * u / 6.0 : std::sin(u) / u; }

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ConfigError(std::string(what) + " must be finite and positive");
  }
}

}  // namespace

PhysicalConfig::PhysicalConfig(double wavelength)
    : PhysicalConfig(wavelength,
                     std::sqrt(3.0 * wavelength /
                               ((2.0 * std::numbers::pi / wavelength) * kFreeSpaceImpedance))) {}

PhysicalConfig::PhysicalConfig(double wavelength, double dipole_length)
    : wavelength_(wavelength), wavenumber_(0.0), dipole_length_(dipole_length) {
  require_positive(wavelength, "wavelength");
  require_positive(dipole_length, "dipole length");
  wavenumber_ = 2.0 * std::numbers::pi / wavelength_;
}

double PhysicalConfig::self_resistance() const {
  return wavenumber_ * dipole_length_ * dipole_length_ * kFreeSpaceImpedance / (3.0 * wavelength_);
}

// z(r) = i l^2 eta e^{-ikr} / (2 lambda r)
//        * (1 - z^2/r^2 - i/(kr) - 1/(kr)^2 + 3i z^2/(k r^3) + 3 z^2/(k^2 r^4))
//
// With u = kr and c2 = z^2/r^2 this is
//   z = i K [ (1 - c2) e^{-iu}/u + (1 - 3 c2) e^{-iu} (-i/u^2 - 1/u^3) ],
// K = l^2 eta k / (2 lambda). The real part is evaluated through spherical
// Bessel functions so it stays accurate as u -> 0:
//   Re z = K [ (1 - c2) j0(u) - (1 - 3 c2) j1(u)/u ].
Complex mutual_impedance(const Position& r, const PhysicalConfig& phys) {
  const double rn = r.norm();
  if (!(rn > 0.0)) {
    throw ConfigError("self-impedance requested; use self_impedance_real");
  }
  const double k = phys.wavenumber();
  const double l = phys.dipole_length();
  const double scale = l * l * phys.impedance() * k / (2.0 * phys.wavelength());
  const double u = k * rn;
  const double c2 = (r.z * r.z) / (rn * rn);
  const double transverse = 1.0 - c2;
  const double near = 1.0 - 3.0 * c2;

  const double re = scale * (transverse * sinc(u) - near * j1_over_u(u));
  const double cu = std::cos(u);
  const double su = std::sin(u);
  const double im = scale * (transverse * cu / u - near * (su / (u * u) + cu / (u * u * u)));
  return {re, im};
}

double self_impedance_real(const PhysicalConfig& phys) { return phys.self_resistance(); }

}  // namespace lismimo
