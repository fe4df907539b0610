#pragma once

#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "svylasso/dataset.hpp"

namespace svylasso {

/// Per-observation loss g(y, t) = -log f(y | t) of a canonical GLM, with its
/// first two derivatives in the linear predictor t.
class GlmFamily {
 public:
  virtual ~GlmFamily() = default;

  virtual double loss(double y, double t) const = 0;
  virtual double d1(double y, double t) const = 0;
  virtual double d2(double y, double t) const = 0;
  virtual std::string_view name() const = 0;
};

/// Logistic function evaluated without overflow for any finite t.
double logistic(double t) noexcept;

/// log(1 + exp(t)) without overflow.
double log1p_exp(double t) noexcept;

/// Logit: g = log(1 + e^t) - y t, g' = Λ(t) - y, g'' = Λ(t)(1 - Λ(t)).
class LogitFamily final : public GlmFamily {
 public:
  double loss(double y, double t) const override;
  double d1(double y, double t) const override;
  double d2(double y, double t) const override;
  std::string_view name() const override { return "logit"; }
};

/// Shared immutable logit instance.
const GlmFamily& logit();

/// L(θ) = -n⁻¹ Σ w_i g(y_i, x_i'θ).
double weighted_loglik(const Dataset& ds, const GlmFamily& fam, const Eigen::VectorXd& theta);

/// Score, negative Hessian and information at one point. The weight enters the
/// Hessian linearly and the information quadratically.
struct CurvatureSet {
  Eigen::VectorXd score;        // S(θ) = -n⁻¹ Σ w x ġ
  Eigen::MatrixXd hessian;      // Ĥ(θ) = n⁻¹ Σ w x x' g̈
  Eigen::MatrixXd information;  // Î(θ) = n⁻¹ Σ w² x x' ġ²
  Eigen::VectorXd theta;
};

CurvatureSet curvature(const Dataset& ds, const GlmFamily& fam, const Eigen::VectorXd& theta);

Eigen::VectorXd score(const Dataset& ds, const GlmFamily& fam, const Eigen::VectorXd& theta);
Eigen::MatrixXd hessian(const Dataset& ds, const GlmFamily& fam, const Eigen::VectorXd& theta);

/// Sorted coordinate indices over {0..p}; 0 is the intercept.
using IndexSet = std::vector<Index>;

/// Indices of {0..dim-1} not in `set` (which must be sorted).
IndexSet complement(const IndexSet& set, Index dim);

/// Submatrix / subvector copies by index lists.
Eigen::MatrixXd submatrix(const Eigen::MatrixXd& m, const IndexSet& rows, const IndexSet& cols);
Eigen::VectorXd subvector(const Eigen::VectorXd& v, const IndexSet& idx);

/// Blocks of a CurvatureSet split into a model M (always holding the
/// intercept) and its complement N = -M.
struct ModelPartition {
  IndexSet active;    // M
  IndexSet inactive;  // -M
  Eigen::VectorXd score_m, score_n;
  Eigen::MatrixXd h_mm, h_mn, h_nm, h_nn;
  Eigen::MatrixXd i_mm, i_mn, i_nm, i_nn;

  Index size_m() const noexcept { return static_cast<Index>(active.size()); }
  Index size_n() const noexcept { return static_cast<Index>(inactive.size()); }
};

/// Throws ArgumentError when 0 ∉ M or an index is out of range / repeated.
ModelPartition partition(const CurvatureSet& cs, IndexSet active);

}  // namespace svylasso
