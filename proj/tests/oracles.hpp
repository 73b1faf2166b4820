#pragma once
// Independent reference computations used only by the tests. Nothing here
// calls into the library's impedance or channel code.

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace oracle {

using cd = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;

constexpr double kPi = 3.14159265358979323846;
constexpr double kEta = 376.730313668;

struct Pt {
  double x, y, z;
};

inline double normalized_length(double lambda) {
  const double k = 2.0 * kPi / lambda;
  return std::sqrt(3.0 * lambda / (k * kEta));
}

// E_z at offset (x, y, z) from a unit z-directed current element, i.e. the zz
// entry of the free-space dyadic Green's function. Built from radial
// derivatives of g = exp(-ikr)/r.
inline cd green_zz(double x, double y, double z, double lambda) {
  const double k = 2.0 * kPi / lambda;
  const double r = std::sqrt(x * x + y * y + z * z);
  const cd ph = std::exp(cd(0.0, -k * r));
  const cd g = ph / r;
  const cd g1 = ph * (cd(0.0, -k) / r - 1.0 / (r * r));
  const cd g2 = ph * (-k * k / r + cd(0.0, 2.0 * k) / (r * r) + 2.0 / (r * r * r));
  const double c2 = z * z / (r * r);
  const cd gzz = g2 * c2 + g1 * (1.0 / r - z * z / (r * r * r));
  return cd(0.0, -kEta / (2.0 * lambda)) * (g + gzz / (k * k));
}

// Point-dipole mutual impedance from the Green's function, -l^2 G_zz.
inline cd point_impedance(double x, double y, double z, double lambda) {
  const double l = normalized_length(lambda);
  return -l * l * green_zz(x, y, z, lambda);
}

// Induced-voltage mutual impedance of two parallel z-directed dipoles of
// length `l` carrying uniform current, by nested adaptive Gauss-Kronrod
// quadrature along both segments. The integrand is complex so the error
// control sees |G|; the real part alone cancels badly in the near field.
// `tol` is an absolute tolerance in ohms.
inline cd finite_dipole_impedance(double x, double y, double z, double lambda, double l,
                                  double rel_tol = 1e-10) {
  using boost::math::quadrature::gauss_kronrod;
  // integrate the complex kernel directly: the real part alone cancels in the
  // near field and boost's L1-relative criterion never settles on it
  // below ~1e-10 the Kronrod error estimate sits on roundoff and the
  // recursion runs to full depth without improving the result
  const double tol = std::max(rel_tol, 1e-10);
  auto outer = [&](double t) {
    auto inner = [&](double s) { return green_zz(x, y, z + s - t, lambda); };
    return gauss_kronrod<double, 31>::integrate(inner, -l / 2, l / 2, 8, tol);
  };
  return -gauss_kronrod<double, 31>::integrate(outer, -l / 2, l / 2, 8, tol);
}

// Full (N+M)-port system with current sources on the LIS and conjugate
// matched loads z0 on the users. Unknowns are [v_t; j_r]:
//   v_t - Z_tr j_r = Z_tt j_t
//   (Z_rr + z0) j_r = -Z_rt j_t
struct CircuitSolution {
  CVec v_t;
  CVec j_r;
  double p_t;                // Re{j_t^H v_t} / 2
  std::vector<double> p_rx;  // |j_r|^2 z0 / 2
};

struct Circuit {
  CMat z;  // (N+M) x (N+M)
  int n = 0;
  int m = 0;
  double z0 = 1.0;
};

inline Circuit build_circuit(const std::vector<Pt>& lis, const std::vector<Pt>& ue,
                             double lambda, bool ue_coupling = true) {
  Circuit c;
  c.n = static_cast<int>(lis.size());
  c.m = static_cast<int>(ue.size());
  const double k = 2.0 * kPi / lambda;
  const double l = normalized_length(lambda);
  c.z0 = k * l * l * kEta / (3.0 * lambda);
  std::vector<Pt> all = lis;
  all.insert(all.end(), ue.begin(), ue.end());
  const int t = c.n + c.m;
  c.z = CMat::Zero(t, t);
  for (int i = 0; i < t; ++i) {
    for (int j = 0; j < t; ++j) {
      if (i == j) {
        c.z(i, j) = c.z0;
      } else if (i >= c.n && j >= c.n && !ue_coupling) {
        c.z(i, j) = 0.0;
      } else {
        c.z(i, j) = point_impedance(all[i].x - all[j].x, all[i].y - all[j].y,
                                    all[i].z - all[j].z, lambda);
      }
    }
  }
  return c;
}

inline CircuitSolution solve_circuit(const Circuit& c, const CVec& j_t) {
  const int t = c.n + c.m;
  CMat a = CMat::Zero(t, t);
  CVec rhs(t);
  a.topLeftCorner(c.n, c.n).setIdentity();
  a.topRightCorner(c.n, c.m) = -c.z.topRightCorner(c.n, c.m);
  a.bottomRightCorner(c.m, c.m) = c.z.bottomRightCorner(c.m, c.m);
  a.bottomRightCorner(c.m, c.m).diagonal().array() += c.z0;
  rhs.head(c.n) = c.z.topLeftCorner(c.n, c.n) * j_t;
  rhs.tail(c.m) = -c.z.bottomLeftCorner(c.m, c.n) * j_t;
  const CVec x = a.fullPivLu().solve(rhs);
  CircuitSolution s;
  s.v_t = x.head(c.n);
  s.j_r = x.tail(c.m);
  s.p_t = 0.5 * j_t.dot(s.v_t).real();
  for (int i = 0; i < c.m; ++i) s.p_rx.push_back(0.5 * std::norm(s.j_r(i)) * c.z0);
  return s;
}

// Channel column by column: response of the circuit to unit currents.
inline CMat circuit_channel(const Circuit& c) {
  CMat h(c.m, c.n);
  for (int i = 0; i < c.n; ++i) {
    CVec e = CVec::Zero(c.n);
    e(i) = 1.0;
    h.col(i) = solve_circuit(c, e).j_r;
  }
  return h;
}

// SINR straight from the definition, one user and one interferer at a time.
inline std::vector<double> loop_sinr(const CMat& h, const CMat& b, double sigma2) {
  std::vector<double> out;
  for (int m = 0; m < h.rows(); ++m) {
    double signal = 0.0, interference = 0.0;
    for (int n = 0; n < b.cols(); ++n) {
      cd acc = 0.0;
      for (int i = 0; i < h.cols(); ++i) acc += h(m, i) * b(i, n);
      if (n == m) {
        signal = std::norm(acc);
      } else {
        interference += std::norm(acc);
      }
    }
    out.push_back(signal / (interference + sigma2));
  }
  return out;
}

// Ratio function of the dual-constraint matched filter, by direct solves.
inline double direct_dual_ratio(const CMat& h, const RMat& r_p, double r_l, double alpha) {
  const int n = static_cast<int>(r_p.rows());
  const RMat d = r_p + alpha * r_l * RMat::Identity(n, n);
  const CMat x = d.cast<cd>().fullPivLu().solve(CMat(h.adjoint()));
  const double num = r_l * x.squaredNorm();
  const double den = (x.adjoint() * r_p.cast<cd>() * x).trace().real();
  return num / den;
}

inline std::vector<Pt> random_points(std::mt19937_64& rng, int count, double x_lo, double x_hi,
                                     double spread) {
  std::uniform_real_distribution<double> ux(x_lo, x_hi), us(-spread, spread);
  std::vector<Pt> out;
  for (int i = 0; i < count; ++i) out.push_back({ux(rng), us(rng), us(rng)});
  return out;
}

}  // namespace oracle
