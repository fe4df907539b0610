#pragma once

#include <Eigen/Core>

#include "svylasso/dataset.hpp"
#include "svylasso/glm.hpp"
#include "svylasso/inference.hpp"

namespace svylasso {

enum class AuxConstruction { coordinate_pin, ame_solve, custom };

/// Restricted estimate θ̃* with ρ(θ̃*) = ρ0.
struct AuxiliaryEstimate {
  Eigen::VectorXd theta;
  AuxConstruction construction = AuxConstruction::custom;
  bool pinv_used = false;
};

struct CalphaStat {
  double statistic = 0.0;
  int df = 1;
  double p_value = 1.0;
  bool pinv_used = false;
};

/// C_α = n S'Ĥ⁻¹ρ̇ (ρ̇'Ĥ⁻¹ÎĤ⁻¹ρ̇)⁻¹ ρ̇'Ĥ⁻¹S with everything at θ̃*; ρ̇ is
/// (p+1) × r. Ĥ falls back to a pseudo-inverse when singular. Throws
/// NumericError when the inner r × r matrix is not positive definite.
CalphaStat c_alpha_stat(const Dataset& ds, const GlmFamily& fam, const AuxiliaryEstimate& aux,
                        const Eigen::MatrixXd& rho_dot);

/// Same test packaged as an InferenceResult; ρ̇ is taken at θ̃*.
InferenceResult c_alpha_test(const Dataset& ds, const GlmFamily& fam, const AuxiliaryEstimate& aux,
                             const ParamFunction& rho, double level = 0.05);

/// θ̃*: coordinate j of `theta` set to `value`, then (when `refine`) one
/// Newton step in the other coordinates with j held fixed.
AuxiliaryEstimate auxiliary_coordinate_pin(const Dataset& ds, const GlmFamily& fam, const Eigen::VectorXd& theta,
                                           Index j, double value, bool refine = true);

/// θ̃*: θ_j chosen by bisection on [-50, 50] so that the weighted AME of
/// binary column j equals `ame0`, the other coordinates held at `theta`.
/// Throws ArgumentError when no solution lies in the bracket.
AuxiliaryEstimate auxiliary_ame_solve(const Dataset& ds, const Eigen::VectorXd& theta, Index j, double ame0);

/// θ̃*: the coordinate-pin construction (θ_j = t, one restricted Newton step
/// in the others) with t chosen by bisection on [-50, 50] so that the AME of
/// the result equals `ame0`. Throws ArgumentError when no t in the bracket
/// works.
AuxiliaryEstimate auxiliary_ame_pin(const Dataset& ds, const GlmFamily& fam, const Eigen::VectorXd& theta, Index j,
                                    double ame0);

}  // namespace svylasso
