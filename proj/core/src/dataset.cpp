#include "svylasso/dataset.hpp"

#include <cmath>
#include <string>

#include "svylasso/errors.hpp"

namespace svylasso {

void Dataset::validate() const {
  if (X.cols() < 1) throw ArgumentError("design matrix has no intercept column");
  if (y.size() != X.rows() || w.size() != X.rows())
    throw ArgumentError("y, X and w must have the same number of rows (y=" + std::to_string(y.size()) +
                        ", X=" + std::to_string(X.rows()) + ", w=" + std::to_string(w.size()) + ")");
  if (X.rows() == 0) throw ArgumentError("dataset has no observations");
  if (!names.empty() && static_cast<Index>(names.size()) != X.cols())
    throw ArgumentError("names must label every design column");
  for (Index i = 0; i < X.rows(); ++i) {
    if (X(i, 0) != 1.0)
      throw ArgumentError("design column 0 must be identically 1 (row " + std::to_string(i) + ")");
    if (!(w[i] > 0.0) || !std::isfinite(w[i]))
      throw ArgumentError("weights must be strictly positive and finite (row " + std::to_string(i) + ")");
    if (!std::isfinite(y[i])) throw ArgumentError("non-finite outcome at row " + std::to_string(i));
  }
  if (!X.allFinite()) throw ArgumentError("design matrix contains non-finite values");
}

Dataset make_dataset(Eigen::VectorXd y, Eigen::MatrixXd X, Eigen::VectorXd w,
                     std::vector<std::string> names) {
  Dataset ds{std::move(y), std::move(X), std::move(w), std::move(names)};
  if (ds.names.empty()) {
    ds.names.reserve(static_cast<std::size_t>(ds.X.cols()));
    ds.names.emplace_back("(Intercept)");
    for (Index j = 1; j < ds.X.cols(); ++j) ds.names.push_back("x" + std::to_string(j));
  }
  ds.validate();
  return ds;
}

Dataset make_dataset_with_intercept(Eigen::VectorXd y, const Eigen::MatrixXd& covariates,
                                    Eigen::VectorXd w, std::vector<std::string> covariate_names) {
  Eigen::MatrixXd X(covariates.rows(), covariates.cols() + 1);
  X.col(0).setOnes();
  X.rightCols(covariates.cols()) = covariates;
  std::vector<std::string> names;
  if (!covariate_names.empty()) {
    names.reserve(covariate_names.size() + 1);
    names.emplace_back("(Intercept)");
    for (auto& s : covariate_names) names.push_back(std::move(s));
  }
  return make_dataset(std::move(y), std::move(X), std::move(w), std::move(names));
}

Dataset with_rescaled_weights(const Dataset& ds) {
  Dataset out = ds;
  out.w *= static_cast<double>(ds.n()) / ds.w.sum();
  return out;
}

bool has_rescaled_weights(const Dataset& ds) {
  const double n = static_cast<double>(ds.n());
  return std::abs(ds.w.sum() - n) <= 1e-12 * n;
}

Dataset permute_rows(const Dataset& ds, const std::vector<Index>& perm) {
  if (static_cast<Index>(perm.size()) != ds.n()) throw ArgumentError("permutation length must equal n");
  return select_rows(ds, perm);
}

Dataset select_rows(const Dataset& ds, const std::vector<Index>& rows) {
  Dataset out;
  const auto m = static_cast<Index>(rows.size());
  out.y.resize(m);
  out.w.resize(m);
  out.X.resize(m, ds.X.cols());
  for (Index i = 0; i < m; ++i) {
    const Index r = rows[static_cast<std::size_t>(i)];
    if (r < 0 || r >= ds.n()) throw ArgumentError("row index out of range");
    out.y[i] = ds.y[r];
    out.w[i] = ds.w[r];
    out.X.row(i) = ds.X.row(r);
  }
  out.names = ds.names;
  return out;
}

}  // namespace svylasso
