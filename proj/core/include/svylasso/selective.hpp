#pragma once

#include <vector>

#include <Eigen/Core>

#include "svylasso/dataset.hpp"
#include "svylasso/glm.hpp"
#include "svylasso/inference.hpp"
#include "svylasso/lasso.hpp"

namespace svylasso {

/// One-step estimator in the selected model M.
struct SelectedEstimate {
  Eigen::VectorXd theta_m;  // θ̃_M = θ̂_M + H_M⁻¹ S_M, |M| entries
  Eigen::VectorXd beta_m;   // θ̃_M without the intercept
  Eigen::VectorXd score_m;  // S_M(θ̂)
  double kkt_gap = 0.0;     // ‖S_M - (0, λ pf∘s)‖∞
};

/// Throws SelectionDegenerateError when no slope is active and NumericError
/// when H_M is singular.
SelectedEstimate one_step_selected(const Dataset& ds, const GlmFamily& fam, const LassoFit& fit);

/// S̃_{-M} = S_{-M} - H_{-M,M} H_M⁻¹ S_M at θ̂. Empty when every slope is active.
Eigen::VectorXd decorrelated_score(const Dataset& ds, const GlmFamily& fam, const LassoFit& fit);

/// The event {selected model, selected signs} written as A Z ≤ b, together
/// with the estimated covariance of Z. Z = n^{1/2} [β̃_M; S̃_{-M}] has p entries.
struct SelectionEvent {
  Eigen::MatrixXd A;      // (2p+1-|M|) × p
  Eigen::VectorXd Z;
  Eigen::VectorXd b;
  Eigen::MatrixXd sigma;  // p × p
  IndexSet active;
  IndexSet inactive;
  std::vector<int> signs;
  double lambda = 0.0;
  Index n = 0;
  Eigen::VectorXd theta_hat;
  Eigen::VectorXd theta_tilde_m;
  Eigen::VectorXd penalty_term;  // (0, λ pf∘s) over M
  Eigen::MatrixXd h_m_inv;
  ModelPartition blocks;
  double max_violation = 0.0;  // max_j (A Z - b)_j at the realized fit

  Index size_m() const noexcept { return static_cast<Index>(active.size()); }
  Index dim() const noexcept { return Z.size(); }
};

/// Builds A, Z, b and Σ̂ from the fit. Throws NumericError when the realized
/// data violate A Z ≤ b beyond `tolerance` (plus a slack proportional to the
/// fit's KKT residual), which signals a solver / certificate mismatch.
SelectionEvent build_selection_event(const Dataset& ds, const GlmFamily& fam, const LassoFit& fit,
                                     double tolerance = 1e-8);

/// Truncation of η'Z implied by A Z ≤ b when Z is decomposed along Σ̂η.
struct PolyhedralSlice {
  Eigen::VectorXd eta;
  Eigen::VectorXd c;
  Eigen::VectorXd r;
  double observed = 0.0;  // η'Z
  double variance = 0.0;  // η'Σ̂η
  double v_minus = 0.0;
  double v_plus = 0.0;
  double v_zero = 0.0;

  /// V⁻ ≤ η'Z ≤ V⁺ and V⁰ ≥ 0 for a candidate value of η'Z with r held fixed.
  bool contains(double value) const noexcept { return v_minus <= value && value <= v_plus && v_zero >= 0.0; }
};

PolyhedralSlice polyhedral_slice(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& Z,
                                 const Eigen::MatrixXd& sigma, const Eigen::VectorXd& eta);
PolyhedralSlice polyhedral_slice(const SelectionEvent& ev, const Eigen::VectorXd& eta);

enum class Alternative { two_sided, less, greater };

/// Truncated-Gaussian pivot inference for η'μ from one slice: CI by mean
/// inversion at 1-ζ/2 and ζ/2, p-value at mean n^{1/2}·null_value. Everything
/// is reported on the 1/n^{1/2} scale.
InferenceResult si_from_slice(const PolyhedralSlice& slice, Index n, double null_value, double level,
                              Method method = Method::si, Alternative alt = Alternative::two_sided);

/// SI for the coefficient of column `coordinate` in the selected model.
/// Returns a not-applicable result when that column is not selected.
InferenceResult si_ci_coordinate(const SelectionEvent& ev, Index coordinate, double null_value, double level = 0.05,
                                 Alternative alt = Alternative::two_sided);

/// Event augmented with n^{1/2}ρ̃ as a leading coordinate, where
/// ρ̃ = ρ(θ̂) + ρ̇_M' H_M⁻¹ S_M is the selected-model one-step estimate.
struct RhoAugmentation {
  Eigen::MatrixXd A;  // (2p+2-|M|) × (p+1)
  Eigen::VectorXd Z;
  Eigen::VectorXd b;
  Eigen::MatrixXd sigma;
  bool sign_conditioned = false;
  int rho_sign = 0;  // sign of ρ(θ̂) when conditioning on it
  double rho_hat = 0.0;
  double rho_tilde = 0.0;
  Index n = 0;
  std::string label;
};

/// Scalar ρ only. Throws ArgumentError when ρ̇_M vanishes.
RhoAugmentation augment_for_rho(const SelectionEvent& ev, const ParamFunction& rho, bool condition_on_sign);

InferenceResult si_ci_rho(const RhoAugmentation& aug, double null_value, double level = 0.05,
                          Alternative alt = Alternative::two_sided);

}  // namespace svylasso
