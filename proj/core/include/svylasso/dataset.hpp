#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

namespace svylasso {

using Index = Eigen::Index;

/// Survey sample: binary (or general) outcomes, a design matrix whose column 0
/// is the intercept, and strictly positive survey weights.
struct Dataset {
  Eigen::VectorXd y;
  Eigen::MatrixXd X;  // n x (p+1), column 0 identically 1
  Eigen::VectorXd w;
  std::vector<std::string> names;  // p+1 labels, names[0] is the intercept

  Index n() const noexcept { return X.rows(); }
  Index p() const noexcept { return X.cols() - 1; }

  /// Throws ArgumentError on any invariant violation.
  void validate() const;
};

/// Builds and validates a dataset. When `names` is empty, columns are labelled
/// "(Intercept)", "x1", ..., "xp".
Dataset make_dataset(Eigen::VectorXd y, Eigen::MatrixXd X, Eigen::VectorXd w,
                     std::vector<std::string> names = {});

/// Same as make_dataset but prepends the intercept column to `covariates`.
Dataset make_dataset_with_intercept(Eigen::VectorXd y, const Eigen::MatrixXd& covariates,
                                    Eigen::VectorXd w, std::vector<std::string> covariate_names = {});

/// Copy with weights rescaled to sum to n.
Dataset with_rescaled_weights(const Dataset& ds);

/// True when sum(w) equals n up to rounding.
bool has_rescaled_weights(const Dataset& ds);

/// Copy with rows permuted: row i of the result is row perm[i] of `ds`.
Dataset permute_rows(const Dataset& ds, const std::vector<Index>& perm);

/// Copy keeping only the listed rows.
Dataset select_rows(const Dataset& ds, const std::vector<Index>& rows);

}  // namespace svylasso
