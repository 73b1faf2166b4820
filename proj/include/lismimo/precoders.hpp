#pragma once

#include <string_view>
#include <variant>

#include "lismimo/network.hpp"
#include "lismimo/types.hpp"

namespace lismimo {

enum class PrecoderMethod { MfLoss, MfRadiated, MfDual, Wmmse };

std::string_view to_string(PrecoderMethod method);

/// KKT multipliers of the matched-filter problem; alpha = mu2 / mu1 when
/// both budgets are active.
struct MfMultipliers {
  double mu1 = 0.0;
  double mu2 = 0.0;
  double alpha = 0.0;
};

/// Regularization weights and power scaling of the last WMMSE iteration.
struct WmmseScaling {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double beta = 0.0;
};

struct PrecoderSolution {
  CMatrix b;  // N x M, column m is the beam for user m
  PrecoderMethod method = PrecoderMethod::MfDual;
  std::variant<MfMultipliers, WmmseScaling> multipliers;
  double achieved_p_t = 0.0;
  double achieved_p_l = 0.0;
  int iterations = 0;
  bool converged = true;
};

/// Diagonals of the receive filter A and weight matrix W, plus the
/// interference-plus-noise power r_m seen by each user.
struct ReceiveState {
  CVector a;
  RVector w;
  RVector r;

  static ReceiveState identity(Eigen::Index users);
};

struct MetricsReport {
  RVector sinr;
  double sum_capacity = 0.0;
  RVector per_ue_rx_power;
  double p_t = 0.0;
  double p_l = 0.0;
};

// Matched filter. Every solver takes R_P so it can report the radiated power
// it achieves.

/// B = H^H sqrt(P_L / (r_l ||H||_F^2)). Throws ConfigError for r_l == 0.
PrecoderSolution mf_loss_constrained(const CMatrix& h, const RMatrix& r_p, double r_l,
                                     double p_l);

/// B = R_P^{-1} H^H scaled to radiate exactly P_R.
PrecoderSolution mf_radiated_constrained(const CMatrix& h, const RMatrix& r_p, double r_l,
                                         double p_r);

/// Matched filter under both budgets. Returns a single-constraint closed form
/// when it already respects the other budget, otherwise solves for the
/// multiplier ratio alpha by bisection so that both budgets are met with
/// equality. Lossless arrays (r_l == 0) fall back to the radiated form.
PrecoderSolution mf_dual(const CMatrix& h, const RMatrix& r_p, double r_l,
                         const Constraints& constraints);

/// alpha -> r_l Tr{H D^-2 H^H} / Tr{H D^-1 R_P D^-1 H^H}, D = R_P + alpha r_l I,
/// evaluated through one eigendecomposition of R_P.
class DualRatio {
 public:
  DualRatio(const CMatrix& h, const RMatrix& r_p, double r_l);

  double operator()(double alpha) const;

  const RVector& eigenvalues() const { return eigenvalues_; }

 private:
  RVector eigenvalues_;
  RVector weight_;  // sum over users of |Q^T H^H|^2 per eigenvector
  double r_l_;
};

struct WmmseOptions {
  int max_iter = 1000;
  double tol = 1e-8;
};

struct WmmseResult {
  PrecoderSolution solution;
  ReceiveState state;
};

/// One pass of the WMMSE loop: beamformer for the current (A, W), power
/// scaling, then the receive-filter and weight updates.
struct WmmseStep {
  CMatrix b;
  WmmseScaling scaling;
  ReceiveState next;
  double sum_capacity = 0.0;
  double rcond = 1.0;  // reciprocal condition estimate of the solved system
};

WmmseStep wmmse_step(const CMatrix& h, const RMatrix& r_p, double r_l,
                     const Constraints& constraints, const ReceiveState& current);

/// Iterates wmmse_step from A = W = I until the relative change in sum
/// capacity drops below options.tol. Hitting max_iter is reported through
/// solution.converged, not thrown.
WmmseResult wmmse(const CMatrix& h, const RMatrix& r_p, double r_l,
                  const Constraints& constraints, const WmmseOptions& options = {});

RVector sinr_per_user(const CMatrix& h, const CMatrix& b, double noise_variance);
double sum_capacity(const RVector& sinr);

MetricsReport evaluate_metrics(const CMatrix& h, const CMatrix& b, const RMatrix& r_p,
                               double r_l, double noise_variance, double z0);

}  // namespace lismimo
