#include "svylasso/selective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "svylasso/errors.hpp"
#include "svylasso/linalg.hpp"
#include "svylasso/stats.hpp"
#include "svylasso/truncnorm.hpp"

namespace svylasso {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const Dataset& rescaled(const Dataset& ds, std::optional<Dataset>& holder) {
  if (has_rescaled_weights(ds)) return ds;
  holder = with_rescaled_weights(ds);
  return *holder;
}

struct SelectedCore {
  ModelPartition blocks;
  Eigen::MatrixXd h_m_inv;
  Eigen::VectorXd penalty_term;
  SelectedEstimate est;
};

SelectedCore selected_core(const Dataset& ds, const GlmFamily& fam, const LassoFit& fit) {
  if (fit.active_slopes() < 1) throw SelectionDegenerateError("no slope selected; the selected model is intercept-only");
  std::optional<Dataset> holder;
  const Dataset& data = rescaled(ds, holder);
  const CurvatureSet cs = curvature(data, fam, fit.theta);
  SelectedCore core;
  core.blocks = partition(cs, fit.active);
  const Index m = core.blocks.size_m();
  core.h_m_inv = SpdFactor(core.blocks.h_mm, "selected-model Hessian block H_M").inverse();

  core.penalty_term = Eigen::VectorXd::Zero(m);
  for (Index k = 1; k < m; ++k) {
    const Index j = fit.active[static_cast<std::size_t>(k)];
    core.penalty_term[k] = fit.lambda * fit.penalty[j] * fit.signs[static_cast<std::size_t>(k - 1)];
  }
  core.est.score_m = core.blocks.score_m;
  core.est.kkt_gap = (core.blocks.score_m - core.penalty_term).lpNorm<Eigen::Infinity>();
  core.est.theta_m = subvector(fit.theta, fit.active) + core.h_m_inv * core.blocks.score_m;
  core.est.beta_m = core.est.theta_m.tail(m - 1);
  return core;
}

}  // namespace

SelectedEstimate one_step_selected(const Dataset& ds, const GlmFamily& fam, const LassoFit& fit) {
  return selected_core(ds, fam, fit).est;
}

Eigen::VectorXd decorrelated_score(const Dataset& ds, const GlmFamily& fam, const LassoFit& fit) {
  const SelectedCore core = selected_core(ds, fam, fit);
  if (core.blocks.size_n() == 0) return Eigen::VectorXd(0);
  return core.blocks.score_n - core.blocks.h_nm * (core.h_m_inv * core.blocks.score_m);
}

SelectionEvent build_selection_event(const Dataset& ds, const GlmFamily& fam, const LassoFit& fit, double tolerance) {
  SelectedCore core = selected_core(ds, fam, fit);
  const ModelPartition& B = core.blocks;
  const Index m = B.size_m();
  const Index q = B.size_n();
  const Index k = m - 1;
  const Index p = k + q;
  const double rn = std::sqrt(static_cast<double>(ds.n()));

  SelectionEvent ev;
  ev.active = fit.active;
  ev.inactive = B.inactive;
  ev.signs = fit.signs;
  ev.lambda = fit.lambda;
  ev.n = ds.n();
  ev.theta_hat = fit.theta;
  ev.theta_tilde_m = core.est.theta_m;
  ev.penalty_term = core.penalty_term;
  ev.h_m_inv = core.h_m_inv;

  const Eigen::VectorXd s_tilde = B.score_n - B.h_nm * (core.h_m_inv * B.score_m);
  ev.Z.resize(p);
  ev.Z << rn * core.est.beta_m, rn * s_tilde;

  ev.A = Eigen::MatrixXd::Zero(k + 2 * q, p);
  ev.b.resize(k + 2 * q);
  const Eigen::VectorXd shift_m = core.h_m_inv * core.penalty_term;  // H_M⁻¹(0, λ pf∘s)
  for (Index r = 0; r < k; ++r) {
    const double s = ev.signs[static_cast<std::size_t>(r)];
    ev.A(r, r) = -s;
    ev.b[r] = -rn * s * shift_m[r + 1];
  }
  const Eigen::VectorXd shift_n = B.h_nm * shift_m;
  for (Index r = 0; r < q; ++r) {
    const double bound = fit.lambda * fit.penalty[B.inactive[static_cast<std::size_t>(r)]];
    ev.A(k + r, k + r) = 1.0;
    ev.A(k + q + r, k + r) = -1.0;
    ev.b[k + r] = rn * (bound - shift_n[r]);
    ev.b[k + q + r] = rn * (bound + shift_n[r]);
  }

  // Σ̂ blocks.
  const Eigen::MatrixXd& hinv = core.h_m_inv;
  const Eigen::MatrixXd g = hinv * B.i_mm * hinv;
  ev.sigma.resize(p, p);
  ev.sigma.topLeftCorner(k, k) = g.bottomRightCorner(k, k);
  if (q > 0) {
    const Eigen::MatrixXd cross = hinv * B.i_mn - g * B.h_mn;  // |M| × q
    ev.sigma.topRightCorner(k, q) = cross.bottomRows(k);
    ev.sigma.bottomLeftCorner(q, k) = cross.bottomRows(k).transpose();
    const Eigen::MatrixXd d = B.h_nm * hinv;  // q × |M|
    Eigen::MatrixXd ss = B.i_nn - d * B.i_mn - B.i_nm * d.transpose() + d * B.i_mm * d.transpose();
    ev.sigma.bottomRightCorner(q, q) = 0.5 * (ss + ss.transpose());
  }
  ev.sigma = (0.5 * (ev.sigma + ev.sigma.transpose())).eval();
  ev.blocks = std::move(core.blocks);

  const Eigen::VectorXd excess = ev.A * ev.Z - ev.b;
  ev.max_violation = excess.size() > 0 ? excess.maxCoeff() : -kInf;
  // Z carries the fitted score while b carries its KKT value; they differ by
  // the solver's KKT residual, magnified by n^{1/2}.
  const double slack = tolerance + rn * core.est.kkt_gap * (1.0 + spectral_norm(ev.blocks.h_nm * hinv));
  if (ev.max_violation > slack) {
    throw NumericError("realized fit violates its own selection event by " + std::to_string(ev.max_violation));
  }
  return ev;
}

PolyhedralSlice polyhedral_slice(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& Z,
                                 const Eigen::MatrixXd& sigma, const Eigen::VectorXd& eta) {
  if (A.cols() != Z.size() || A.rows() != b.size() || sigma.rows() != Z.size() || sigma.cols() != Z.size() ||
      eta.size() != Z.size()) {
    throw ArgumentError("polyhedral_slice: dimension mismatch");
  }
  PolyhedralSlice sl;
  sl.eta = eta;
  const Eigen::VectorXd se = sigma * eta;
  sl.variance = eta.dot(se);
  if (!(sl.variance > 0.0)) throw NumericError("eta' Sigma eta is not positive");
  sl.c = se / sl.variance;
  sl.observed = eta.dot(Z);
  sl.r = Z - sl.c * sl.observed;

  const Eigen::VectorXd ac = A * sl.c;
  const Eigen::VectorXd slack = b - A * sl.r;
  sl.v_minus = -kInf;
  sl.v_plus = kInf;
  sl.v_zero = kInf;
  const double cnorm = sl.c.norm();
  for (Index j = 0; j < A.rows(); ++j) {
    const double zero_cut = 1e-12 * std::max(1.0, A.row(j).norm() * cnorm);
    if (ac[j] < -zero_cut) {
      sl.v_minus = std::max(sl.v_minus, slack[j] / ac[j]);
    } else if (ac[j] > zero_cut) {
      sl.v_plus = std::min(sl.v_plus, slack[j] / ac[j]);
    } else {
      sl.v_zero = std::min(sl.v_zero, slack[j]);
    }
  }
  return sl;
}

PolyhedralSlice polyhedral_slice(const SelectionEvent& ev, const Eigen::VectorXd& eta) {
  return polyhedral_slice(ev.A, ev.b, ev.Z, ev.sigma, eta);
}

InferenceResult si_from_slice(const PolyhedralSlice& slice, Index n, double null_value, double level, Method method,
                              Alternative alt) {
  if (!(level > 0.0 && level < 1.0)) throw ArgumentError("level must lie in (0, 1)");
  if (n <= 0) throw ArgumentError("sample size must be positive");
  const double rn = std::sqrt(static_cast<double>(n));
  InferenceResult out;
  out.method = method;
  out.level = level;
  out.estimate = slice.observed / rn;
  out.std_error = std::sqrt(slice.variance) / rn;
  out.statistic = (slice.observed - rn * null_value) / std::sqrt(slice.variance);

  const double x = slice.observed;
  if (!(slice.v_minus < x && x < slice.v_plus)) {
    out.applicable = false;
    out.note = "observed statistic lies on the truncation boundary";
    return out;
  }
  const double lo = slice.v_minus;
  const double hi = slice.v_plus;
  // F(x; μ) decreases in μ: the lower limit solves F = 1 - ζ/2.
  out.ci_lower = invert_mean(x, slice.variance, lo, hi, 1.0 - level / 2.0) / rn;
  out.ci_upper = invert_mean(x, slice.variance, lo, hi, level / 2.0) / rn;

  const TruncatedNormal tn{rn * null_value, slice.variance, lo, hi};
  try {
    const double f = truncnorm_cdf(tn, x);
    const double sf = truncnorm_sf(tn, x);
    switch (alt) {
      case Alternative::two_sided: out.p_value = std::min(1.0, 2.0 * std::min(f, sf)); break;
      case Alternative::greater: out.p_value = sf; break;
      case Alternative::less: out.p_value = f; break;
    }
  } catch (const TailDegenerateError&) {
    out.applicable = false;
    out.note = "truncation region has no mass under the null";
  }
  return out;
}

InferenceResult si_ci_coordinate(const SelectionEvent& ev, Index coordinate, double null_value, double level,
                                 Alternative alt) {
  const auto it = std::find(ev.active.begin() + 1, ev.active.end(), coordinate);
  const std::string target = "beta_M[" + std::to_string(coordinate) + "]";
  if (coordinate <= 0 || it == ev.active.end()) {
    return InferenceResult::not_applicable(Method::si, target, "coordinate not selected");
  }
  const Index pos = static_cast<Index>(it - ev.active.begin()) - 1;
  Eigen::VectorXd eta = Eigen::VectorXd::Zero(ev.dim());
  eta[pos] = 1.0;
  InferenceResult out = si_from_slice(polyhedral_slice(ev, eta), ev.n, null_value, level, Method::si, alt);
  out.target = target;
  return out;
}

RhoAugmentation augment_for_rho(const SelectionEvent& ev, const ParamFunction& rho, bool condition_on_sign) {
  const Eigen::VectorXd value = rho.value(ev.theta_hat);
  if (value.size() != 1) throw ArgumentError("augment_for_rho: rho must be scalar");
  const Eigen::MatrixXd jac = rho.jacobian(ev.theta_hat);
  if (jac.rows() != ev.theta_hat.size() || jac.cols() != 1) throw ArgumentError("augment_for_rho: bad Jacobian shape");
  const Eigen::VectorXd dm = subvector(jac.col(0), ev.active);
  if (dm.lpNorm<Eigen::Infinity>() == 0.0) throw ArgumentError("augment_for_rho: Jacobian vanishes on the selected model");

  const ModelPartition& B = ev.blocks;
  const Index m = ev.size_m();
  const Index k = m - 1;
  const Index q = B.size_n();
  const Index p = ev.dim();
  const double rn = std::sqrt(static_cast<double>(ev.n));

  RhoAugmentation aug;
  aug.n = ev.n;
  aug.label = rho.label;
  aug.sign_conditioned = condition_on_sign;
  aug.rho_hat = value[0];
  const Eigen::VectorXd hd = ev.h_m_inv * dm;  // H_M⁻¹ ρ̇_M
  aug.rho_tilde = value[0] + hd.dot(B.score_m);

  aug.Z.resize(p + 1);
  aug.Z << rn * aug.rho_tilde, ev.Z;

  aug.A = Eigen::MatrixXd::Zero(ev.A.rows() + 1, p + 1);
  aug.A.bottomRightCorner(ev.A.rows(), p) = ev.A;
  aug.b.resize(ev.b.size() + 1);
  aug.b << 0.0, ev.b;
  if (condition_on_sign) {
    aug.rho_sign = value[0] >= 0.0 ? 1 : -1;
    aug.A(0, 0) = -aug.rho_sign;
    aug.b[0] = -rn * aug.rho_sign * hd.dot(ev.penalty_term);
  }

  const Eigen::VectorXd gi = B.i_mm * hd;  // I_M H_M⁻¹ ρ̇_M
  aug.sigma.resize(p + 1, p + 1);
  aug.sigma(0, 0) = hd.dot(gi);
  const Eigen::VectorXd rho_beta = (ev.h_m_inv * gi).tail(k);
  aug.sigma.block(0, 1, 1, k) = rho_beta.transpose();
  aug.sigma.block(1, 0, k, 1) = rho_beta;
  if (q > 0) {
    const Eigen::RowVectorXd rho_s = hd.transpose() * B.i_mn - (ev.h_m_inv * gi).transpose() * B.h_mn;
    aug.sigma.block(0, 1 + k, 1, q) = rho_s;
    aug.sigma.block(1 + k, 0, q, 1) = rho_s.transpose();
  }
  aug.sigma.bottomRightCorner(p, p) = ev.sigma;
  return aug;
}

InferenceResult si_ci_rho(const RhoAugmentation& aug, double null_value, double level, Alternative alt) {
  Eigen::VectorXd eta = Eigen::VectorXd::Zero(aug.Z.size());
  eta[0] = 1.0;
  const Method method = aug.sign_conditioned ? Method::si : Method::si2;
  InferenceResult out =
      si_from_slice(polyhedral_slice(aug.A, aug.b, aug.Z, aug.sigma, eta), aug.n, null_value, level, method, alt);
  out.target = aug.label;
  return out;
}

}  // namespace svylasso
