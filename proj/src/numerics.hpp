#pragma once

#include <cmath>

#include <Eigen/Core>

namespace lismimo::detail {

inline void split(double a, double& high, double& low) {
  constexpr double kSplitter = 134217729.0;  // 2^27 + 1
  const double c = kSplitter * a;
  high = c - (c - a);
  low = a - high;
}

// Sum carried as an unevaluated pair hi + lo (Ogita, Rump and Oishi's Dot2).
struct DoubleDouble {
  double hi = 0.0;
  double lo = 0.0;

  void add(double x) {
    const double s = hi + x;
    const double bb = s - hi;
    lo += (hi - (s - bb)) + (x - bb);
    hi = s;
  }

  // Exact product error via Veltkamp splitting, so no hardware FMA needed.
  void add_product(double a, double b) {
    const double p = a * b;
    double ah, al, bh, bl;
    split(a, ah, al);
    split(b, bh, bl);
    lo += ((ah * bh - p) + ah * bl + al * bh) + al * bl;
    add(p);
  }

  double value() const { return hi + lo; }
};

// Throws NumericalError when singular, warns above condition 1e12.
void check_conditioning(double rcond, const char* what, Eigen::Index n);

}  // namespace lismimo::detail
