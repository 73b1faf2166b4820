#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "lismimo/geometry.hpp"
#include "lismimo/network.hpp"
#include "lismimo/precoders.hpp"

namespace lismimo {

// Lengths in scenario documents are in wavelengths.

struct LinearArraySpec {
  double length = 4.0;
  int count = 9;
};

struct PlanarArraySpec {
  double len_y = 4.0;
  double len_z = 4.0;
  int count_y = 9;
  int count_z = 9;
};

using ArraySpec = std::variant<LinearArraySpec, PlanarArraySpec>;

struct UeLineSpec {
  double distance_x = 20.0;
  double length = 10.0;
  int count = 1;
};

struct UeExplicitSpec {
  std::vector<Position> positions;
};

using UeSpec = std::variant<UeLineSpec, UeExplicitSpec>;

enum class PrecoderKind { MfDual, Wmmse };

struct ScenarioConfig {
  double wavelength = 1.0;
  ArraySpec array = LinearArraySpec{};
  UeSpec ue = UeLineSpec{};
  double efficiency = 1.0;
  Constraints constraints;
  bool ue_coupling = true;
  bool scattering = true;
  PrecoderKind precoder = PrecoderKind::MfDual;
  WmmseOptions wmmse;

  /// Throws ConfigError on any out-of-range field.
  void validate() const;

  /// Element and user positions in meters.
  Geometry geometry() const;

  /// Element spacing in wavelengths (y axis for planar arrays).
  double spacing() const;
};

/// Parses a scenario document. Unknown keys anywhere are errors.
ScenarioConfig parse_scenario(const std::string& json_text);
ScenarioConfig load_scenario(const std::string& path);
std::string to_json(const ScenarioConfig& config);

/// FNV-1a over the canonical JSON form.
std::uint64_t config_hash(const ScenarioConfig& config);
std::string hex_hash(std::uint64_t h);

}  // namespace lismimo
