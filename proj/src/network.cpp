#include "lismimo/network.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "lismimo/errors.hpp"
#include "lismimo/log.hpp"
#include "numerics.hpp"

namespace lismimo {
namespace {

Eigen::PartialPivLU<CMatrix> factor_user_loads(const ImpedanceSystem& sys) {
  const auto m = static_cast<Eigen::Index>(sys.ue_count());
  CMatrix s = sys.z_rr;
  s.diagonal().array() += sys.z0;  // conjugate-matched loads, z0* = z0
  Eigen::PartialPivLU<CMatrix> lu(s);
  detail::check_conditioning(lu.rcond(), "Z_rr + I z0", m);
  return lu;
}

RMatrix radiated_from_factor(const ImpedanceSystem& sys,
                             const Eigen::PartialPivLU<CMatrix>* lu) {
  RMatrix r = sys.z_tt.real();
  if (lu != nullptr) {
    const CMatrix scattered = sys.z_rt.transpose() * lu->solve(sys.z_rt);
    r -= scattered.real();
  }
  return 0.5 * (r + r.transpose());
}

}  // namespace

namespace detail {

void check_conditioning(double rcond, const char* what, Eigen::Index n) {
  if (n == 0) return;
  if (!std::isfinite(rcond) || rcond <= 0.0) {
    std::ostringstream os;
    os << "singular system " << what << " (reciprocal condition estimate " << rcond << ")";
    throw NumericalError(os.str());
  }
  if (rcond < 1e-12) {
    std::ostringstream os;
    os << "superdirective regime ill-conditioning: " << what << " condition estimate "
       << 1.0 / rcond;
    warn(os.str());
  }
}

}  // namespace detail

void Constraints::validate() const {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(p_r)) throw ConfigError("radiated power budget P_R must be positive");
  if (!positive(p_l)) throw ConfigError("loss budget P_L must be positive");
  if (!positive(noise_variance)) throw ConfigError("noise variance must be positive");
}

double loss_resistance_from_efficiency(double efficiency, double z0) {
  if (!(efficiency > 0.0) || !(efficiency <= 1.0)) {
    throw ConfigError("radiation efficiency must lie in (0, 1]");
  }
  if (!(z0 > 0.0)) throw ConfigError("self-resistance must be positive");
  return z0 * (1.0 - efficiency) / efficiency;
}

ImpedanceSystem assemble(const Geometry& geometry, const PhysicalConfig& phys, double r_l,
                         bool ue_coupling) {
  geometry.validate();
  if (!(r_l >= 0.0) || !std::isfinite(r_l)) {
    throw ConfigError("loss resistance must be finite and non-negative");
  }
  const auto n = static_cast<Eigen::Index>(geometry.lis_count());
  const auto m = static_cast<Eigen::Index>(geometry.ue_count());

  ImpedanceSystem sys;
  sys.z0 = self_impedance_real(phys);
  sys.r_l = r_l;

  sys.z_tt.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    sys.z_tt(j, j) = sys.z0;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const Complex z = mutual_impedance(geometry.lis[i] - geometry.lis[j], phys);
      sys.z_tt(i, j) = z;
      sys.z_tt(j, i) = z;
    }
  }

  sys.z_rt.resize(m, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) {
      sys.z_rt(i, j) = mutual_impedance(geometry.ue[i] - geometry.lis[j], phys);
    }
  }

  sys.z_rr = CMatrix::Identity(m, m) * sys.z0;
  if (ue_coupling) {
    for (Eigen::Index j = 0; j < m; ++j) {
      for (Eigen::Index i = j + 1; i < m; ++i) {
        const Complex z = mutual_impedance(geometry.ue[i] - geometry.ue[j], phys);
        sys.z_rr(i, j) = z;
        sys.z_rr(j, i) = z;
      }
    }
  }
  return sys;
}

CMatrix channel_matrix(const ImpedanceSystem& sys) {
  const auto lu = factor_user_loads(sys);
  return -lu.solve(sys.z_rt);
}

RMatrix radiated_resistance_matrix(const ImpedanceSystem& sys, bool include_scattering) {
  if (!include_scattering) return radiated_from_factor(sys, nullptr);
  const auto lu = factor_user_loads(sys);
  return radiated_from_factor(sys, &lu);
}

ChannelModel build_channel(const ImpedanceSystem& sys, bool include_scattering) {
  const auto lu = factor_user_loads(sys);
  ChannelModel model;
  model.h = -lu.solve(sys.z_rt);
  model.r_p = radiated_from_factor(sys, include_scattering ? &lu : nullptr);
  model.scattering_included = include_scattering;
  return model;
}

CVector received_currents(const ImpedanceSystem& sys, const CVector& j_t) {
  if (static_cast<std::size_t>(j_t.size()) != sys.lis_count()) {
    throw ConfigError("transmit current vector length does not match the LIS size");
  }
  return channel_matrix(sys) * j_t;
}

RVector received_power_per_ue(const CVector& j_r, double z0) {
  return j_r.cwiseAbs2() * (0.5 * z0);
}

double transmit_power(const CVector& j_t, const RMatrix& r_p) {
  if (j_t.size() != r_p.rows()) {
    throw ConfigError("transmit current vector length does not match R_P");
  }
  return clamp_power(0.5 * hermitian_trace_form(j_t, r_p), "transmit power");
}

double thermal_loss(const CVector& j_t, double r_l) { return 0.5 * r_l * j_t.squaredNorm(); }

PrecodedPowers precoded_powers(const CMatrix& b, const RMatrix& r_p, double r_l) {
  if (b.rows() != r_p.rows()) {
    throw ConfigError("beamformer row count does not match R_P");
  }
  return {clamp_power(hermitian_trace_form(b, r_p), "radiated power"), r_l * b.squaredNorm()};
}

double hermitian_trace_form(const CMatrix& b, const RMatrix& r) {
  // Tr{B^H R B} = sum_k u_k^T R u_k over the 2M real vectors u_k (real and
  // imaginary parts of the columns of B), R symmetric. Each (R u_k)_i is
  // summed in double-double, then dotted with u_k in double-double again.
  // The k loop carries independent accumulators so it pipelines; a single
  // running sum per row is latency bound and was the WMMSE hot spot.
  const Eigen::Index n = r.rows();
  const Eigen::Index cols = 2 * b.cols();
  std::vector<double> u(n * cols), uh(n * cols), ul(n * cols);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index m = 0; m < b.cols(); ++m) {
      u[j * cols + 2 * m] = b(j, m).real();
      u[j * cols + 2 * m + 1] = b(j, m).imag();
    }
  }
  for (std::size_t t = 0; t < u.size(); ++t) detail::split(u[t], uh[t], ul[t]);

  std::vector<double> hi(cols), lo(cols);
  detail::DoubleDouble total;
  for (Eigen::Index i = 0; i < n; ++i) {
    std::fill(hi.begin(), hi.end(), 0.0);
    std::fill(lo.begin(), lo.end(), 0.0);
    const double* col = r.col(i).data();  // column i == row i
    for (Eigen::Index j = 0; j < n; ++j) {
      const double rij = col[j];
      if (rij == 0.0) continue;
      double rh, rl;
      detail::split(rij, rh, rl);
      const double* uj = &u[j * cols];
      const double* ujh = &uh[j * cols];
      const double* ujl = &ul[j * cols];
      for (Eigen::Index k = 0; k < cols; ++k) {
        const double p = rij * uj[k];
        const double err = ((rh * ujh[k] - p) + rh * ujl[k] + rl * ujh[k]) + rl * ujl[k];
        const double s = hi[k] + p;
        const double bb = s - hi[k];
        lo[k] += ((hi[k] - (s - bb)) + (p - bb)) + err;
        hi[k] = s;
      }
    }
    const double* ui = &u[i * cols];
    for (Eigen::Index k = 0; k < cols; ++k) {
      if (ui[k] == 0.0) continue;
      total.add_product(ui[k], hi[k]);
      total.add_product(ui[k], lo[k]);
    }
  }
  return total.value();
}

RVector precoded_rx_power(const CMatrix& h, const CMatrix& b, double z0) {
  return (h * b).rowwise().squaredNorm() * z0;
}

double clamp_power(double p, const char* what) {
  if (!std::isfinite(p)) {
    throw NumericalError(std::string("non-finite ") + what);
  }
  if (p < 0.0) {
    if (p >= -1e-12) return 0.0;
    std::ostringstream os;
    os << what << " is negative (" << p << " W): R_P is not passive";
    throw InvariantViolation(os.str());
  }
  return p;
}

}  // namespace lismimo
