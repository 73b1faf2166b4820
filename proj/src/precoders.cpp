#include "lismimo/precoders.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "lismimo/errors.hpp"
#include "lismimo/log.hpp"
#include "numerics.hpp"

namespace lismimo {
namespace {

template <typename Factor>
CMatrix solve_real_system(const Factor& factor, const CMatrix& rhs) {
  const RMatrix re = factor.solve(rhs.real());
  const RMatrix im = factor.solve(rhs.imag());
  CMatrix out(rhs.rows(), rhs.cols());
  out.real() = re;
  out.imag() = im;
  return out;
}

void require_channel(const CMatrix& h, const RMatrix& r_p) {
  if (h.cols() != r_p.rows() || r_p.rows() != r_p.cols()) {
    throw ConfigError("channel and R_P dimensions disagree");
  }
  if (h.squaredNorm() == 0.0) throw ConfigError("channel matrix is zero");
}

void require_budget(double p, const char* what) {
  if (!(p > 0.0) || !std::isfinite(p)) {
    throw ConfigError(std::string(what) + " must be positive");
  }
}

PrecoderSolution finish_mf(CMatrix b, PrecoderMethod method, MfMultipliers mult,
                           const RMatrix& r_p, double r_l) {
  PrecoderSolution s;
  const auto powers = precoded_powers(b, r_p, r_l);
  s.b = std::move(b);
  s.method = method;
  s.multipliers = mult;
  s.achieved_p_t = powers.radiated;
  s.achieved_p_l = powers.loss;
  return s;
}

// R^+ rhs over eigenvalues above n eps lambda_max, the level below which a
// computed eigenvalue of a symmetric matrix carries no information.
CMatrix truncated_solve(const RMatrix& r, const CMatrix& rhs) {
  Eigen::SelfAdjointEigenSolver<RMatrix> es(r);
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition of R_P failed");
  const RVector& lam = es.eigenvalues();
  const double floor = static_cast<double>(r.rows()) * std::numeric_limits<double>::epsilon() *
                       lam.cwiseAbs().maxCoeff();
  RVector inv = RVector::Zero(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam(i) > floor) inv(i) = 1.0 / lam(i);
  }
  const RMatrix& q = es.eigenvectors();
  const RMatrix w = inv.asDiagonal() * q.transpose();
  CMatrix out(rhs.rows(), rhs.cols());
  out.real() = q * (w * rhs.real());
  out.imag() = q * (w * rhs.imag());
  return out;
}

}  // namespace

std::string_view to_string(PrecoderMethod method) {
  switch (method) {
    case PrecoderMethod::MfLoss:
      return "mf-loss";
    case PrecoderMethod::MfRadiated:
      return "mf-radiated";
    case PrecoderMethod::MfDual:
      return "mf-dual";
    case PrecoderMethod::Wmmse:
      return "wmmse";
  }
  return "unknown";
}

ReceiveState ReceiveState::identity(Eigen::Index users) {
  return {CVector::Ones(users), RVector::Ones(users), RVector::Zero(users)};
}

PrecoderSolution mf_loss_constrained(const CMatrix& h, const RMatrix& r_p, double r_l,
                                     double p_l) {
  if (r_l == 0.0) throw ConfigError("loss constraint vacuous for lossless antennas");
  if (!(r_l > 0.0)) throw ConfigError("loss resistance must be positive");
  require_budget(p_l, "loss budget P_L");
  require_channel(h, r_p);
  const double scale = std::sqrt(p_l / (r_l * h.squaredNorm()));
  // B = H^H / (2 mu2 r_l)
  MfMultipliers mult{0.0, 1.0 / (2.0 * r_l * scale), 0.0};
  return finish_mf(h.adjoint() * scale, PrecoderMethod::MfLoss, mult, r_p, r_l);
}

PrecoderSolution mf_radiated_constrained(const CMatrix& h, const RMatrix& r_p, double r_l,
                                         double p_r) {
  require_budget(p_r, "radiated power budget P_R");
  require_channel(h, r_p);
  Eigen::PartialPivLU<RMatrix> lu(r_p);
  detail::check_conditioning(lu.rcond(), "R_P", r_p.rows());
  CMatrix x = solve_real_system(lu, h.adjoint());
  // Normalize with the same quadratic form that reports the achieved power,
  // so the budget holds as evaluated.
  double q = hermitian_trace_form(x, r_p);
  if (!(q > 0.0) || !std::isfinite(q)) {
    // R_P is passive, so a non-positive form means roundoff has made it
    // indefinite. Solve again on the eigenvectors it still resolves.
    std::ostringstream os;
    os << "R_P numerically indefinite (Tr{H R_P^-1 H^H} = " << q
       << "); radiated-only beam restricted to eigenvalues above the roundoff floor";
    warn(os.str());
    x = truncated_solve(r_p, h.adjoint());
    q = hermitian_trace_form(x, r_p);
  }
  if (!(q > 0.0) || !std::isfinite(q)) {
    std::ostringstream os;
    os << "radiated-power normalization Tr{H R_P^-1 H^H} = " << q << " is not positive";
    throw NumericalError(os.str());
  }
  const double scale = std::sqrt(p_r / q);
  MfMultipliers mult{1.0 / (2.0 * scale), 0.0, 0.0};
  return finish_mf(x * scale, PrecoderMethod::MfRadiated, mult, r_p, r_l);
}

DualRatio::DualRatio(const CMatrix& h, const RMatrix& r_p, double r_l) : r_l_(r_l) {
  Eigen::SelfAdjointEigenSolver<RMatrix> es(r_p);
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition of R_P failed");
  eigenvalues_ = es.eigenvalues();
  const RMatrix& q = es.eigenvectors();
  const CMatrix hh = h.adjoint();
  const RMatrix gr = q.transpose() * hh.real();
  const RMatrix gi = q.transpose() * hh.imag();
  weight_ = gr.rowwise().squaredNorm() + gi.rowwise().squaredNorm();
}

double DualRatio::operator()(double alpha) const {
  const RVector d = eigenvalues_.array() + alpha * r_l_;
  const RVector inv2 = d.array().square().inverse();
  const double num = weight_.dot(inv2);
  const double den = (eigenvalues_.array() * weight_.array() * inv2.array()).sum();
  return r_l_ * num / den;
}

PrecoderSolution mf_dual(const CMatrix& h, const RMatrix& r_p, double r_l,
                         const Constraints& constraints) {
  constraints.validate();
  require_channel(h, r_p);
  if (r_l == 0.0) return mf_radiated_constrained(h, r_p, r_l, constraints.p_r);

  auto loss_only = mf_loss_constrained(h, r_p, r_l, constraints.p_l);
  if (loss_only.achieved_p_t <= constraints.p_r) return loss_only;

  auto radiated_only = mf_radiated_constrained(h, r_p, r_l, constraints.p_r);
  if (radiated_only.achieved_p_l <= constraints.p_l) return radiated_only;

  // Both budgets active. The ratio decreases monotonically in alpha; near
  // alpha = 0 it can be non-finite when R_P has roundoff-level eigenvalues,
  // which is treated as "above target".
  const DualRatio ratio(h, r_p, r_l);
  const double target = constraints.p_l / constraints.p_r;
  auto above = [&](double alpha) {
    const double v = ratio(alpha);
    return !std::isfinite(v) || v > target;
  };

  double lo = 0.0;
  double hi = 1.0;
  int doublings = 0;
  while (above(hi)) {
    if (++doublings > 200) throw NumericalError("dual-constraint root not bracketed");
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (above(mid) ? lo : hi) = mid;
  }
  const double alpha = 0.5 * (lo + hi);

  RMatrix shifted = r_p;
  shifted.diagonal().array() += alpha * r_l;
  CMatrix x;
  Eigen::LLT<RMatrix> llt(shifted);
  if (llt.info() == Eigen::Success) {
    x = solve_real_system(llt, h.adjoint());
  } else {
    Eigen::PartialPivLU<RMatrix> lu(shifted);
    detail::check_conditioning(lu.rcond(), "R_P + alpha r_l I", shifted.rows());
    x = solve_real_system(lu, h.adjoint());
  }

  // mu1 from 4 P_R mu1^2 = Tr{X^H R_P X}; the loss budget then holds through
  // the bisected alpha.
  const double q = hermitian_trace_form(x, r_p);
  if (!(q > 0.0) || !std::isfinite(q)) {
    throw NumericalError("dual-constraint normalization is not positive");
  }
  const double mu1 = std::sqrt(q / (4.0 * constraints.p_r));
  MfMultipliers mult{mu1, alpha * mu1, alpha};
  return finish_mf(x / (2.0 * mu1), PrecoderMethod::MfDual, mult, r_p, r_l);
}

namespace {

// Coordinates in which R_P is the identity: B = T C with T = Q L^-1/2 over
// the eigenvalues above the roundoff floor. The WMMSE system then reads
// G^H W G + a1 I + a2 r_l L^-1 with G = H T, whose condition number is set
// by the channel and a1 rather than by the superdirective null space of R_P.
// Solving the original N x N system directly hit condition estimates of
// 1e20 and the iteration wandered on roundoff instead of ascending.
struct Whitening {
  RMatrix t;
  CMatrix g;
  RVector inv_lambda;
};

Whitening whiten(const CMatrix& h, const RMatrix& r_p) {
  Eigen::SelfAdjointEigenSolver<RMatrix> es(r_p);
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition of R_P failed");
  const RVector& lam = es.eigenvalues();
  const double floor = static_cast<double>(r_p.rows()) *
                       std::numeric_limits<double>::epsilon() * lam.cwiseAbs().maxCoeff();
  Eigen::Index kept = 0;
  for (Eigen::Index i = 0; i < lam.size(); ++i) kept += lam(i) > floor;
  if (kept == 0) throw NumericalError("R_P has no eigenvalue above the roundoff floor");
  Whitening wt;
  wt.t.resize(r_p.rows(), kept);
  wt.inv_lambda.resize(kept);
  Eigen::Index c = 0;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (!(lam(i) > floor)) continue;
    wt.t.col(c) = es.eigenvectors().col(i) / std::sqrt(lam(i));
    wt.inv_lambda(c) = 1.0 / lam(i);
    ++c;
  }
  wt.g = h * wt.t.cast<Complex>();
  return wt;
}

WmmseStep whitened_step(const CMatrix& h, const RMatrix& r_p, double r_l,
                        const Constraints& constraints, const ReceiveState& current,
                        const Whitening& wt) {
  const Eigen::Index m = h.rows();
  const double s2 = constraints.noise_variance;

  const CMatrix ag = current.a.asDiagonal() * wt.g;                    // A H T
  const CMatrix wag = current.w.cast<Complex>().asDiagonal() * ag;     // W A H T
  const double trace_awa = (current.w.array() * current.a.cwiseAbs2().array()).sum();

  WmmseStep step;
  step.scaling.alpha1 = s2 * trace_awa / constraints.p_r;
  step.scaling.alpha2 = r_l > 0.0 ? s2 * trace_awa / constraints.p_l : 0.0;

  CMatrix k = ag.adjoint() * wag;
  k.diagonal().real().array() +=
      step.scaling.alpha1 + step.scaling.alpha2 * r_l * wt.inv_lambda.array();
  Eigen::LLT<CMatrix> llt(k);
  if (llt.info() != Eigen::Success) throw NumericalError("singular WMMSE system");
  step.rcond = llt.rcond();
  if (!std::isfinite(step.rcond) || step.rcond <= 0.0) {
    throw NumericalError("singular WMMSE system");
  }
  const CMatrix b_tilde = wt.t.cast<Complex>() * llt.solve(wag.adjoint());

  const double pt = hermitian_trace_form(b_tilde, r_p);
  const double beta_r = std::sqrt(constraints.p_r / pt);
  const double beta_l = r_l > 0.0 ? std::sqrt(constraints.p_l / (r_l * b_tilde.squaredNorm()))
                                  : std::numeric_limits<double>::infinity();
  step.scaling.beta = beta_l < beta_r ? beta_l : beta_r;
  step.b = step.scaling.beta * b_tilde;

  const CMatrix hb = h * step.b;
  step.next.a.resize(m);
  step.next.w.resize(m);
  step.next.r.resize(m);
  RVector sinr(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Complex d = hb(i, i);
    double interference = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (j != i) interference += std::norm(hb(i, j));
    }
    const double r = s2 + interference;
    const double signal = std::norm(d);
    step.next.r(i) = r;
    step.next.a(i) = std::conj(d) / (signal + r);
    step.next.w(i) = 1.0 + signal / r;
    sinr(i) = signal / r;
  }
  // A starved user's receiver decays geometrically toward zero and would
  // drift into subnormals, which are two orders of magnitude slower. Below
  // this ratio its SINR already rounds to zero, and zero is where the
  // iteration is heading anyway.
  const double a_max = step.next.a.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < m; ++i) {
    if (std::abs(step.next.a(i)) < 1e-100 * a_max) step.next.a(i) = 0.0;
  }
  step.sum_capacity = sum_capacity(sinr);
  return step;
}

}  // namespace

WmmseStep wmmse_step(const CMatrix& h, const RMatrix& r_p, double r_l,
                     const Constraints& constraints, const ReceiveState& current) {
  return whitened_step(h, r_p, r_l, constraints, current, whiten(h, r_p));
}

WmmseResult wmmse(const CMatrix& h, const RMatrix& r_p, double r_l,
                  const Constraints& constraints, const WmmseOptions& options) {
  constraints.validate();
  if (h.cols() != r_p.rows() || r_p.rows() != r_p.cols()) {
    throw ConfigError("channel and R_P dimensions disagree");
  }
  if (options.max_iter < 1) throw ConfigError("WMMSE max_iter must be at least 1");
  if (!(options.tol >= 0.0)) throw ConfigError("WMMSE tolerance must be non-negative");

  WmmseResult result;
  result.solution.method = PrecoderMethod::Wmmse;
  result.state = ReceiveState::identity(h.rows());
  if (h.squaredNorm() == 0.0) {
    result.solution.b = CMatrix::Zero(h.cols(), h.rows());
    result.solution.multipliers = WmmseScaling{};
    result.solution.iterations = 0;
    result.solution.converged = true;
    return result;
  }

  double previous = std::numeric_limits<double>::quiet_NaN();
  double worst_rcond = std::numeric_limits<double>::infinity();
  const Whitening wt = whiten(h, r_p);
  WmmseStep step;
  bool converged = false;
  int it = 0;
  while (it < options.max_iter) {
    ++it;
    try {
      step = whitened_step(h, r_p, r_l, constraints, result.state, wt);
    } catch (const NumericalError& e) {
      std::ostringstream os;
      os << e.what() << " in WMMSE iteration " << it;
      throw NumericalError(os.str());
    }
    if (!std::isfinite(step.sum_capacity) || !step.b.allFinite() ||
        !std::isfinite(step.scaling.beta)) {
      std::ostringstream os;
      os << "non-finite values in WMMSE iteration " << it;
      throw NumericalError(os.str());
    }
    worst_rcond = std::min(worst_rcond, step.rcond);
    result.state = step.next;
    if (it > 1 && std::abs(step.sum_capacity - previous) <= options.tol * std::abs(previous)) {
      converged = true;
      break;
    }
    previous = step.sum_capacity;
  }
  if (worst_rcond < 1e-12) {
    std::ostringstream os;
    os << "superdirective regime ill-conditioning: WMMSE system condition estimate up to "
       << 1.0 / worst_rcond;
    warn(os.str());
  }

  const auto powers = precoded_powers(step.b, r_p, r_l);
  result.solution.b = std::move(step.b);
  result.solution.multipliers = step.scaling;
  result.solution.achieved_p_t = powers.radiated;
  result.solution.achieved_p_l = powers.loss;
  result.solution.iterations = it;
  result.solution.converged = converged;
  return result;
}

RVector sinr_per_user(const CMatrix& h, const CMatrix& b, double noise_variance) {
  if (h.cols() != b.rows() || h.rows() != b.cols()) {
    throw ConfigError("channel and beamformer dimensions disagree");
  }
  if (!(noise_variance > 0.0)) throw ConfigError("noise variance must be positive");
  const RMatrix gain = (h * b).cwiseAbs2();
  RVector sinr(gain.rows());
  for (Eigen::Index m = 0; m < gain.rows(); ++m) {
    double interference = 0.0;
    for (Eigen::Index n = 0; n < gain.cols(); ++n) {
      if (n != m) interference += gain(m, n);
    }
    sinr(m) = gain(m, m) / (interference + noise_variance);
  }
  return sinr;
}

double sum_capacity(const RVector& sinr) {
  double c = 0.0;
  for (Eigen::Index m = 0; m < sinr.size(); ++m) {
    if (sinr(m) < 0.0) throw ConfigError("negative SINR");
    c += std::log2(1.0 + sinr(m));
  }
  return c;
}

MetricsReport evaluate_metrics(const CMatrix& h, const CMatrix& b, const RMatrix& r_p,
                               double r_l, double noise_variance, double z0) {
  MetricsReport report;
  report.sinr = sinr_per_user(h, b, noise_variance);
  report.sum_capacity = sum_capacity(report.sinr);
  report.per_ue_rx_power = precoded_rx_power(h, b, z0);
  const auto powers = precoded_powers(b, r_p, r_l);
  report.p_t = powers.radiated;
  report.p_l = powers.loss;
  return report;
}

}  // namespace lismimo
