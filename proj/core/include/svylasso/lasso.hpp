#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "svylasso/dataset.hpp"
#include "svylasso/glm.hpp"

namespace svylasso {

struct LassoOptions {
  double tol_change = 1e-8;  // outer stop: max coordinate change
  double tol_kkt = 1e-6;
  int max_outer = 200;
  int max_inner = 1000;  // coordinate-descent sweeps per outer step
  /// Penalize |β_j| by λ·sd_j (weighted column sd). Equivalent to fitting on
  /// standardized columns and back-transforming.
  bool standardize = false;
};

/// Solution of min_θ -L(θ) + λ Σ_j pf_j |β_j| with the intercept unpenalized.
/// Weights are rescaled to sum to n before fitting.
struct LassoFit {
  Eigen::VectorXd theta;
  double lambda = 0.0;
  Eigen::VectorXd penalty;  // per-coordinate factors, penalty[0] == 0
  IndexSet active;          // 0 plus every slope with θ_j != 0
  std::vector<int> signs;   // sign(θ_j) for active slopes, in order
  Eigen::VectorXd inactive_subgradient;  // u = S_{-M}/λ over the inactive set
  int iterations = 0;
  bool converged = false;
  std::vector<double> objective_trace;  // objective after each outer step

  Index active_slopes() const noexcept { return static_cast<Index>(active.size()) - 1; }
};

/// Penalized objective -L(θ) + λ Σ pf_j |θ_j| on the rescaled weights.
double penalized_objective(const Dataset& ds, const GlmFamily& fam, const Eigen::VectorXd& theta,
                           double lambda, const Eigen::VectorXd& penalty);

/// Per-coordinate penalty factors: ones (or column sds when standardizing), 0 for the intercept.
Eigen::VectorXd penalty_factors(const Dataset& ds, bool standardize);

/// Throws ArgumentError for λ < 0, ConvergenceError (carrying the last
/// iterate) when the outer loop exhausts max_outer.
LassoFit fit_penalized(const Dataset& ds, const GlmFamily& fam, double lambda, const LassoOptions& opts = {},
                       const Eigen::VectorXd* warm_start = nullptr);

/// Intercept-only fit on the rescaled weights. Throws DataError when the
/// intercept diverges (e.g. a constant outcome).
Eigen::VectorXd fit_intercept_only(const Dataset& ds, const GlmFamily& fam);

/// Smallest λ giving all-zero slopes: max_j |S_j(θ_null)| / pf_j.
double lambda_max(const Dataset& ds, const GlmFamily& fam, const LassoOptions& opts = {});

struct KktReport {
  double intercept_residual = 0.0;   // |S_0|
  double max_active_residual = 0.0;  // max |S_j - λ pf_j sign(θ_j)|
  double max_inactive_excess = 0.0;  // max |S_j| - λ pf_j over inactive slopes
  Eigen::VectorXd subgradient;       // sign for active slopes, u for inactive, 0 for intercept
  bool satisfied = true;
};

KktReport kkt_certificate(const Dataset& ds, const GlmFamily& fam, const LassoFit& fit, double tol_kkt = 1e-6);

/// Warm-started fits along a descending λ grid. Does not throw on
/// non-convergence; each fit carries its own flag. With `early_stop`, the
/// path ends once the deviance ratio passes 0.999 or stops improving, and
/// the remaining grid points repeat the last fit.
std::vector<LassoFit> fit_path(const Dataset& ds, const GlmFamily& fam, const std::vector<double>& grid,
                               const LassoOptions& opts = {}, bool early_stop = false,
                               std::size_t* path_length = nullptr);

/// Log-spaced grid from λ_max down to λ_max·min_ratio. A non-positive
/// `min_ratio` picks 1e-4 when n > p+1 and 1e-2 otherwise.
std::vector<double> default_lambda_grid(const Dataset& ds, const GlmFamily& fam, int count = 100,
                                        double min_ratio = -1.0, const LassoOptions& opts = {});

enum class CvLoss { auc, deviance };

/// Which λ to report: the best mean score, or the largest λ whose mean
/// score is within one standard error of the best.
enum class CvRule { best, one_se };

struct CvSpec {
  int folds = 10;
  CvLoss loss = CvLoss::auc;
  std::vector<double> grid;  // empty: default_lambda_grid with glmnet-style truncation
  std::uint64_t seed = 1;
  int max_redraws = 50;
  CvRule rule = CvRule::best;
  LassoOptions lasso;
};

struct CvResult {
  double lambda = 0.0;
  std::size_t best_index = 0;  // best mean score
  std::size_t one_se_index = 0;
  std::size_t chosen_index = 0;  // per CvSpec::rule; `lambda` and `fit` refer to it
  std::vector<double> grid;        // deduplicated, strictly decreasing
  std::vector<double> mean_score;  // mean AUC (higher better) or deviance (lower better)
  std::vector<double> std_error;
  std::vector<int> fold_of;        // fold label per observation
  int redraws = 0;
  LassoFit fit;                    // full-data fit at the selected λ
};

/// K-fold cross-validation. The best λ maximizes mean out-of-fold AUC (or
/// minimizes deviance); ties go to the larger λ. Folds are random; after
/// `max_redraws` draws without both outcome classes in every fold, each class
/// is dealt over the folds instead. Throws DataError when even that fails.
CvResult cv_select_lambda(const Dataset& ds, const GlmFamily& fam, const CvSpec& spec);

/// Weighted area under the ROC curve, ties counted one half.
double weighted_auc(const Eigen::VectorXd& y, const Eigen::VectorXd& score, const Eigen::VectorXd& w);

}  // namespace svylasso
