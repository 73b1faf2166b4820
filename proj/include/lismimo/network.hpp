#pragma once

#include <cstddef>

#include "lismimo/dipole.hpp"
#include "lismimo/geometry.hpp"
#include "lismimo/types.hpp"

namespace lismimo {

/// Blocks of the (N+M)-port impedance matrix [Z_tt Z_rt^T; Z_rt Z_rr].
///
/// Diagonals of z_tt and z_rr hold the real self-resistance z0. The self
/// reactance of an infinitesimal dipole is unbounded; it drops out of every
/// quantity computed here because users are conjugate matched and transmit
/// power only sees Re{Z_tt}.
struct ImpedanceSystem {
  CMatrix z_tt;  // N x N
  CMatrix z_rt;  // M x N
  CMatrix z_rr;  // M x M
  double z0 = 1.0;
  double r_l = 0.0;

  std::size_t lis_count() const { return static_cast<std::size_t>(z_tt.rows()); }
  std::size_t ue_count() const { return static_cast<std::size_t>(z_rr.rows()); }
};

struct ChannelModel {
  CMatrix h;    // M x N, receive currents per transmit current
  RMatrix r_p;  // N x N, radiated-resistance form
  bool scattering_included = true;
};

/// Power budgets and receiver noise, all in watts.
struct Constraints {
  double p_r = 1.0;
  double p_l = 1.0;
  double noise_variance = 1e-8;

  void validate() const;
};

struct PrecodedPowers {
  double radiated = 0.0;
  double loss = 0.0;
};

/// Loss resistance giving radiation efficiency e_r = z0 / (z0 + r_l).
double loss_resistance_from_efficiency(double efficiency, double z0);

/// Fills the impedance blocks from mutual_impedance. With ue_coupling off,
/// Z_rr is replaced by z0 I.
ImpedanceSystem assemble(const Geometry& geometry, const PhysicalConfig& phys, double r_l,
                         bool ue_coupling = true);

/// H = -(Z_rr + I z0)^{-1} Z_rt.
CMatrix channel_matrix(const ImpedanceSystem& sys);

/// R_P = Re{Z_tt - Z_rt^T (Z_rr + I z0)^{-1} Z_rt}, or Re{Z_tt} without the
/// user scattering term. Symmetrized.
RMatrix radiated_resistance_matrix(const ImpedanceSystem& sys, bool include_scattering);

/// H and R_P from a single factorization of Z_rr + I z0.
ChannelModel build_channel(const ImpedanceSystem& sys, bool include_scattering);

// Peak-phasor current quantities (carry the 1/2 of time averaging).

CVector received_currents(const ImpedanceSystem& sys, const CVector& j_t);
RVector received_power_per_ue(const CVector& j_r, double z0);
double transmit_power(const CVector& j_t, const RMatrix& r_p);
double thermal_loss(const CVector& j_t, double r_l);

// RMS beamformer quantities (columns carry unit-power symbols).

/// Tr{B^H R_P B} and r_l Tr{B^H B}.
PrecodedPowers precoded_powers(const CMatrix& b, const RMatrix& r_p, double r_l);

/// Tr{B^H R B} for real symmetric R, accumulated with error-free transforms.
///
/// Superdirective beams have huge entries whose contributions cancel almost
/// exactly; a plain double accumulation loses most significant digits of the
/// radiated power.
double hermitian_trace_form(const CMatrix& b, const RMatrix& r);

/// Received power per user for a beamformer: sum_n |(H B)_{mn}|^2 z0.
RVector precoded_rx_power(const CMatrix& h, const CMatrix& b, double z0);

/// Negative powers within 1e-12 W are roundoff and clamp to zero; anything
/// more negative throws InvariantViolation.
double clamp_power(double p, const char* what);

}  // namespace lismimo
