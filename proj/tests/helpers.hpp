#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "lismimo/geometry.hpp"
#include "lismimo/log.hpp"
#include "oracles.hpp"

namespace testing {

inline double rel(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

inline double rel(std::complex<double> a, std::complex<double> b) {
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

inline lismimo::PositionList to_positions(const std::vector<oracle::Pt>& pts) {
  lismimo::PositionList out;
  for (const auto& p : pts) out.push_back({p.x, p.y, p.z});
  return out;
}

inline std::vector<oracle::Pt> to_points(const lismimo::PositionList& list) {
  std::vector<oracle::Pt> out;
  for (const auto& p : list) out.push_back({p.x, p.y, p.z});
  return out;
}

// LIS elements in the yz-plane at random spots, at least `min_gap` apart.
inline lismimo::PositionList random_lis(std::mt19937_64& rng, int count, double spread,
                                        double min_gap = 0.05) {
  std::uniform_real_distribution<double> u(-spread, spread);
  lismimo::PositionList out;
  while (static_cast<int>(out.size()) < count) {
    lismimo::Position p{0.0, u(rng), u(rng)};
    bool ok = true;
    for (const auto& q : out) ok = ok && (p - q).norm() >= min_gap;
    if (ok) out.push_back(p);
  }
  return out;
}

inline lismimo::PositionList random_ues(std::mt19937_64& rng, int count, double x_lo,
                                        double x_hi, double spread) {
  std::uniform_real_distribution<double> ux(x_lo, x_hi), us(-spread, spread);
  lismimo::PositionList out;
  while (static_cast<int>(out.size()) < count) {
    lismimo::Position p{ux(rng), us(rng), us(rng)};
    bool ok = true;
    for (const auto& q : out) ok = ok && (p - q).norm() >= 0.2;
    if (ok) out.push_back(p);
  }
  return out;
}

// Collects warnings instead of printing them, for the lifetime of the object.
struct WarningCapture {
  std::vector<std::string> messages;
  WarningCapture() {
    lismimo::set_warning_sink([this](const std::string& m) { messages.push_back(m); });
  }
  ~WarningCapture() { lismimo::set_warning_sink(nullptr); }
};

}  // namespace testing
