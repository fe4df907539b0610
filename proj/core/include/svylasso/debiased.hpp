#pragma once

#include <Eigen/Core>

#include "svylasso/dataset.hpp"
#include "svylasso/glm.hpp"
#include "svylasso/inference.hpp"
#include "svylasso/lasso.hpp"

namespace svylasso {

/// θ̃ = θ̂ + Ĥ(θ̂)⁻¹ S(θ̂), via a Cholesky solve. Throws NumericError when
/// Ĥ(θ̂) is singular.
Eigen::VectorXd db_one_step(const Dataset& ds, const GlmFamily& fam, const LassoFit& fit);

/// ρ̃ = ρ(θ̂) + ρ̇(θ̂)' Ĥ(θ̂)⁻¹ S(θ̂).
Eigen::VectorXd db_rho(const Dataset& ds, const GlmFamily& fam, const LassoFit& fit, const ParamFunction& rho);

/// Wald test of H0: ρ(θ0) = ρ0 from the one-step estimate with sandwich
/// variance V̂ = ρ̇'Ĥ⁻¹ÎĤ⁻¹ρ̇. Scalar ρ: normal statistic, p-value and
/// CI ρ̃ ± z_{1-ζ/2}(V̂/n)^{1/2}. Vector ρ: chi-square form with r df.
InferenceResult db_wald(const Dataset& ds, const GlmFamily& fam, const LassoFit& fit, const ParamFunction& rho,
                        const Eigen::VectorXd& null_value, double level = 0.05);

/// Unpenalized weighted maximum likelihood by Newton-Raphson with a fixed
/// iteration budget. A run that does not converge keeps its last iterate.
struct MleFit {
  Eigen::VectorXd theta;
  int iterations = 0;
  bool converged = false;
  bool pinv_used = false;
};

MleFit fit_mle(const Dataset& ds, const GlmFamily& fam, int max_iterations = 25, double tol = 1e-8);

/// Survey-weighted t (Wald) test from the unpenalized fit with sandwich
/// variance Ĥ⁻¹ÎĤ⁻¹ at the MLE.
InferenceResult tsvy_wald(const Dataset& ds, const GlmFamily& fam, const MleFit& mle, const ParamFunction& rho,
                          const Eigen::VectorXd& null_value, double level = 0.05);

/// Sandwich covariance Ĥ⁻¹ÎĤ⁻¹ at θ (unscaled: divide by n for Var(θ̂)).
Eigen::MatrixXd sandwich_covariance(const Dataset& ds, const GlmFamily& fam, const Eigen::VectorXd& theta,
                                    bool allow_pinv = false, bool* used_pinv = nullptr);

}  // namespace svylasso
