#pragma once

#include <Eigen/Core>

#include "svylasso/dataset.hpp"
#include "svylasso/glm.hpp"
#include "svylasso/inference.hpp"
#include "svylasso/lasso.hpp"

namespace svylasso {

/// True when every entry of column j is 0 or 1.
bool is_binary_column(const Dataset& ds, Index j);

/// Weighted average marginal effect of switching binary column j from 0 to 1
/// in the logit model: (Σw)⁻¹ Σ w [Λ(x'θ | x_j=1) - Λ(x'θ | x_j=0)].
/// Only column j is substituted. Throws ArgumentError for a non-binary column.
double ame_estimate(const Dataset& ds, const Eigen::VectorXd& theta, Index j);

/// ∂AME_j/∂θ: (Σw)⁻¹ Σ w [x¹ Λ'(x¹'θ) - x⁰ Λ'(x⁰'θ)].
Eigen::VectorXd ame_jacobian(const Dataset& ds, const Eigen::VectorXd& theta, Index j);

/// The Jacobian written for θ_j = 0, where only entry j survives:
/// e_j · (Σw)⁻¹ Σ w Λ'(x'θ)|_{x_j=1}.
Eigen::VectorXd ame_jacobian_zero_coefficient(const Dataset& ds, const Eigen::VectorXd& theta, Index j);

/// AME_j as a ParamFunction. Holds its own copy of the design.
ParamFunction ame_function(const Dataset& ds, Index j);

/// Inference on H0: AME_j = ame0 by DB, SI (sign-conditioned), SI2,
/// C(α) or the unpenalized survey t test. SI variants return not-applicable
/// when column j is not selected. C(α) uses auxiliary_ame_pin, which for
/// ame0 = 0 is the θ_j = 0 coordinate pin.
InferenceResult ame_infer(const Dataset& ds, const GlmFamily& fam, const LassoFit& fit, Index j, Method method,
                          double ame0, double level = 0.05);

}  // namespace svylasso
