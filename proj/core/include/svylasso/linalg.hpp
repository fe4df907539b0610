#pragma once

#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace svylasso {

using Index = Eigen::Index;

/// Cholesky factorization of a symmetric positive-definite matrix. Construction
/// throws NumericError naming `what` when the matrix is not numerically PD.
class SpdFactor {
 public:
  SpdFactor(const Eigen::MatrixXd& a, std::string what);

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const { return llt_.solve(b); }
  Eigen::MatrixXd solve(const Eigen::MatrixXd& b) const { return llt_.solve(b); }
  Eigen::MatrixXd inverse() const;
  Index dim() const noexcept { return llt_.rows(); }

 private:
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

/// Moore-Penrose pseudo-inverse via SVD with the usual relative cutoff.
Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& a);

/// Inverse of a symmetric matrix; falls back to the pseudo-inverse when the
/// Cholesky factorization fails and records that in `used_pinv`.
Eigen::MatrixXd inverse_or_pinv(const Eigen::MatrixXd& a, bool& used_pinv);

/// Spectral norm (largest singular value).
double spectral_norm(const Eigen::MatrixXd& a);

}  // namespace svylasso
