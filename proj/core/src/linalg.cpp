#include "svylasso/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "svylasso/errors.hpp"

namespace svylasso {

namespace {

// Relative diagonal floor for the Cholesky pivots; below it the block is
// treated as singular.
constexpr double kPivotFloor = 1e-13;

bool factor_ok(const Eigen::LLT<Eigen::MatrixXd>& llt, const Eigen::MatrixXd& a) {
  if (llt.info() != Eigen::Success) return false;
  const Eigen::VectorXd d = llt.matrixLLT().diagonal();
  if (!d.allFinite()) return false;
  const double scale = std::max(a.diagonal().cwiseAbs().maxCoeff(), 1e-300);
  for (Index i = 0; i < d.size(); ++i)
    if (d[i] * d[i] <= kPivotFloor * scale) return false;
  return true;
}

}  // namespace

SpdFactor::SpdFactor(const Eigen::MatrixXd& a, std::string what) {
  if (a.rows() != a.cols()) throw ArgumentError(what + ": matrix is not square");
  if (a.rows() == 0) return;
  llt_.compute(a);
  if (!factor_ok(llt_, a)) throw NumericError(what + " is singular or not positive definite");
}

Eigen::MatrixXd SpdFactor::inverse() const {
  return llt_.solve(Eigen::MatrixXd::Identity(llt_.rows(), llt_.cols()));
}

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return Eigen::MatrixXd(a.cols(), a.rows());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double cutoff =
      std::numeric_limits<double>::epsilon() * static_cast<double>(std::max(a.rows(), a.cols())) * s[0];
  Eigen::VectorXd inv(s.size());
  for (Index i = 0; i < s.size(); ++i) inv[i] = s[i] > cutoff ? 1.0 / s[i] : 0.0;
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Eigen::MatrixXd inverse_or_pinv(const Eigen::MatrixXd& a, bool& used_pinv) {
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (a.rows() == 0 || factor_ok(llt, a)) {
    used_pinv = false;
    return llt.solve(Eigen::MatrixXd::Identity(a.rows(), a.cols()));
  }
  used_pinv = true;
  return pseudo_inverse(a);
}

double spectral_norm(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  return svd.singularValues()[0];
}

}  // namespace svylasso
