#include "svylasso/debiased.hpp"

#include <cmath>
#include <optional>

#include "svylasso/errors.hpp"
#include "svylasso/linalg.hpp"
#include "svylasso/stats.hpp"

namespace svylasso {

namespace {

const Dataset& rescaled(const Dataset& ds, std::optional<Dataset>& holder) {
  if (has_rescaled_weights(ds)) return ds;
  holder = with_rescaled_weights(ds);
  return *holder;
}

constexpr const char* kSingularAdvice =
    "Hessian at the Lasso estimate is singular; increase lambda or reduce the number of regressors";

SpdFactor factor_hessian(const Eigen::MatrixXd& h) {
  try {
    return SpdFactor(h, "Hessian");
  } catch (const NumericError&) {
    throw NumericError(kSingularAdvice);
  }
}

// Fills statistic / p-value / CI from a point estimate, its null value and
// the variance matrix of n^{1/2}(estimate - truth).
void wald_fill(InferenceResult& out, const Eigen::VectorXd& estimate, const Eigen::VectorXd& null_value,
               const Eigen::MatrixXd& v, double n, double level) {
  const Index r = estimate.size();
  out.df = static_cast<int>(r);
  out.level = level;
  if (r == 1) {
    if (!(v(0, 0) > 0.0)) throw NumericError("Wald variance is not positive");
    const double se = std::sqrt(v(0, 0) / n);
    const double z = normal_quantile(1.0 - level / 2.0);
    out.estimate = estimate[0];
    out.std_error = se;
    out.statistic = (estimate[0] - null_value[0]) / se;
    out.p_value = two_sided_normal_p(out.statistic);
    out.ci_lower = estimate[0] - z * se;
    out.ci_upper = estimate[0] + z * se;
    return;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(v);
  if (llt.info() != Eigen::Success) throw NumericError("Wald variance matrix is not positive definite");
  const Eigen::VectorXd diff = estimate - null_value;
  out.statistic = n * diff.dot(llt.solve(diff));
  out.p_value = chi_square_sf(out.statistic, static_cast<double>(r));
}

}  // namespace

Eigen::MatrixXd sandwich_covariance(const Dataset& ds, const GlmFamily& fam, const Eigen::VectorXd& theta,
                                    bool allow_pinv, bool* used_pinv) {
  std::optional<Dataset> holder;
  const Dataset& data = rescaled(ds, holder);
  const CurvatureSet cs = curvature(data, fam, theta);
  Eigen::MatrixXd hinv;
  if (allow_pinv) {
    bool pinv = false;
    hinv = inverse_or_pinv(cs.hessian, pinv);
    if (used_pinv != nullptr) *used_pinv = pinv;
  } else {
    hinv = factor_hessian(cs.hessian).inverse();
    if (used_pinv != nullptr) *used_pinv = false;
  }
  Eigen::MatrixXd v = hinv * cs.information * hinv;
  return 0.5 * (v + v.transpose());
}

Eigen::VectorXd db_one_step(const Dataset& ds, const GlmFamily& fam, const LassoFit& fit) {
  std::optional<Dataset> holder;
  const Dataset& data = rescaled(ds, holder);
  const CurvatureSet cs = curvature(data, fam, fit.theta);
  return fit.theta + factor_hessian(cs.hessian).solve(cs.score);
}

Eigen::VectorXd db_rho(const Dataset& ds, const GlmFamily& fam, const LassoFit& fit, const ParamFunction& rho) {
  std::optional<Dataset> holder;
  const Dataset& data = rescaled(ds, holder);
  const CurvatureSet cs = curvature(data, fam, fit.theta);
  const Eigen::VectorXd step = factor_hessian(cs.hessian).solve(cs.score);
  return rho.value(fit.theta) + rho.jacobian(fit.theta).transpose() * step;
}

InferenceResult db_wald(const Dataset& ds, const GlmFamily& fam, const LassoFit& fit, const ParamFunction& rho,
                        const Eigen::VectorXd& null_value, double level) {
  if (!(level > 0.0 && level < 1.0)) throw ArgumentError("level must lie in (0, 1)");
  std::optional<Dataset> holder;
  const Dataset& data = rescaled(ds, holder);
  const CurvatureSet cs = curvature(data, fam, fit.theta);
  const SpdFactor h = factor_hessian(cs.hessian);
  const Eigen::MatrixXd jac = rho.jacobian(fit.theta);
  if (jac.rows() != fit.theta.size()) throw ArgumentError("Jacobian must have p+1 rows");
  if (null_value.size() != jac.cols()) throw ArgumentError("null value dimension does not match rho");

  const Eigen::VectorXd estimate = rho.value(fit.theta) + jac.transpose() * h.solve(cs.score);
  const Eigen::MatrixXd b = h.solve(jac);
  Eigen::MatrixXd v = b.transpose() * cs.information * b;
  v = 0.5 * (v + v.transpose()).eval();

  InferenceResult out;
  out.method = Method::db;
  out.target = rho.label;
  wald_fill(out, estimate, null_value, v, static_cast<double>(data.n()), level);
  return out;
}

MleFit fit_mle(const Dataset& ds, const GlmFamily& fam, int max_iterations, double tol) {
  std::optional<Dataset> holder;
  const Dataset& data = rescaled(ds, holder);
  MleFit out;
  out.theta = Eigen::VectorXd::Zero(data.X.cols());
  try {
    out.theta = fit_intercept_only(data, fam);
  } catch (const DataError&) {
    // Leave θ = 0; Newton will diverge and report non-convergence.
  }
  double dev = -2.0 * weighted_loglik(data, fam, out.theta);
  for (int it = 1; it <= max_iterations; ++it) {
    out.iterations = it;
    const CurvatureSet cs = curvature(data, fam, out.theta);
    bool pinv = false;
    const Eigen::MatrixXd hinv = inverse_or_pinv(cs.hessian, pinv);
    out.pinv_used = out.pinv_used || pinv;
    const Eigen::VectorXd next = out.theta + hinv * cs.score;
    if (!next.allFinite()) break;
    out.theta = next;
    double new_dev;
    try {
      new_dev = -2.0 * weighted_loglik(data, fam, out.theta);
    } catch (const NumericError&) {
      break;
    }
    // Relative deviance change, as in the usual IRLS stopping rule.
    if (std::abs(new_dev - dev) / (std::abs(new_dev) + 0.1) < tol) {
      out.converged = true;
      break;
    }
    dev = new_dev;
  }
  return out;
}

InferenceResult tsvy_wald(const Dataset& ds, const GlmFamily& fam, const MleFit& mle, const ParamFunction& rho,
                          const Eigen::VectorXd& null_value, double level) {
  if (!(level > 0.0 && level < 1.0)) throw ArgumentError("level must lie in (0, 1)");
  std::optional<Dataset> holder;
  const Dataset& data = rescaled(ds, holder);
  bool pinv = false;
  const Eigen::MatrixXd cov = sandwich_covariance(data, fam, mle.theta, true, &pinv);
  const Eigen::MatrixXd jac = rho.jacobian(mle.theta);
  Eigen::MatrixXd v = jac.transpose() * cov * jac;
  v = 0.5 * (v + v.transpose()).eval();

  InferenceResult out;
  out.method = Method::tsvy;
  out.target = rho.label;
  out.pinv_used = pinv || mle.pinv_used;
  if (!mle.converged) out.note = "unpenalized fit did not converge";
  wald_fill(out, rho.value(mle.theta), null_value, v, static_cast<double>(data.n()), level);
  return out;
}

}  // namespace svylasso
