#include "svylasso/glm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "svylasso/errors.hpp"

namespace svylasso {

double logistic(double t) noexcept {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double log1p_exp(double t) noexcept {
  if (t > 0.0) return t + std::log1p(std::exp(-t));
  return std::log1p(std::exp(t));
}

double LogitFamily::loss(double y, double t) const { return log1p_exp(t) - y * t; }

double LogitFamily::d1(double y, double t) const { return logistic(t) - y; }

double LogitFamily::d2(double, double t) const {
  // Λ(t)(1-Λ(t)) = Λ(t)Λ(-t), both factors accurate in the tails.
  return logistic(t) * logistic(-t);
}

const GlmFamily& logit() {
  static const LogitFamily instance;
  return instance;
}

namespace {

void check_dims(const Dataset& ds, const Eigen::VectorXd& theta) {
  if (theta.size() != ds.X.cols())
    throw ArgumentError("parameter length " + std::to_string(theta.size()) +
                        " does not match design width " + std::to_string(ds.X.cols()));
}

}  // namespace

double weighted_loglik(const Dataset& ds, const GlmFamily& fam, const Eigen::VectorXd& theta) {
  check_dims(ds, theta);
  const Eigen::VectorXd eta = ds.X * theta;
  double total = 0.0;
  for (Index i = 0; i < ds.n(); ++i) total += ds.w[i] * fam.loss(ds.y[i], eta[i]);
  const double value = -total / static_cast<double>(ds.n());
  if (!std::isfinite(value)) throw NumericError("weighted log-likelihood is not finite");
  return value;
}

Eigen::VectorXd score(const Dataset& ds, const GlmFamily& fam, const Eigen::VectorXd& theta) {
  check_dims(ds, theta);
  const Eigen::VectorXd eta = ds.X * theta;
  Eigen::VectorXd r(ds.n());
  for (Index i = 0; i < ds.n(); ++i) r[i] = ds.w[i] * fam.d1(ds.y[i], eta[i]);
  Eigen::VectorXd s = -(ds.X.transpose() * r) / static_cast<double>(ds.n());
  if (!s.allFinite()) throw NumericError("score is not finite");
  return s;
}

Eigen::MatrixXd hessian(const Dataset& ds, const GlmFamily& fam, const Eigen::VectorXd& theta) {
  check_dims(ds, theta);
  const Eigen::VectorXd eta = ds.X * theta;
  Eigen::VectorXd v(ds.n());
  for (Index i = 0; i < ds.n(); ++i) v[i] = ds.w[i] * fam.d2(ds.y[i], eta[i]);
  Eigen::MatrixXd h = ds.X.transpose() * v.asDiagonal() * ds.X;
  h /= static_cast<double>(ds.n());
  return h;
}

CurvatureSet curvature(const Dataset& ds, const GlmFamily& fam, const Eigen::VectorXd& theta) {
  check_dims(ds, theta);
  const Index n = ds.n();
  const Eigen::VectorXd eta = ds.X * theta;
  Eigen::VectorXd first(n), hw(n), iw(n);
  for (Index i = 0; i < n; ++i) {
    const double g1 = fam.d1(ds.y[i], eta[i]);
    first[i] = ds.w[i] * g1;
    hw[i] = ds.w[i] * fam.d2(ds.y[i], eta[i]);
    iw[i] = first[i] * first[i];
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  CurvatureSet cs;
  cs.theta = theta;
  cs.score = -(ds.X.transpose() * first) * inv_n;
  cs.hessian = (ds.X.transpose() * hw.asDiagonal() * ds.X) * inv_n;
  cs.information = (ds.X.transpose() * iw.asDiagonal() * ds.X) * inv_n;
  // Products above are symmetric up to rounding; make it exact.
  cs.hessian = 0.5 * (cs.hessian + cs.hessian.transpose()).eval();
  cs.information = 0.5 * (cs.information + cs.information.transpose()).eval();
  if (!cs.score.allFinite() || !cs.hessian.allFinite() || !cs.information.allFinite())
    throw NumericError("curvature evaluation produced non-finite values");
  return cs;
}

IndexSet complement(const IndexSet& set, Index dim) {
  IndexSet out;
  out.reserve(static_cast<std::size_t>(dim));
  std::size_t k = 0;
  for (Index j = 0; j < dim; ++j) {
    if (k < set.size() && set[k] == j) {
      ++k;
      continue;
    }
    out.push_back(j);
  }
  return out;
}

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& m, const IndexSet& rows, const IndexSet& cols) {
  Eigen::MatrixXd out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c)
      out(static_cast<Index>(r), static_cast<Index>(c)) = m(rows[r], cols[c]);
  return out;
}

Eigen::VectorXd subvector(const Eigen::VectorXd& v, const IndexSet& idx) {
  Eigen::VectorXd out(static_cast<Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out[static_cast<Index>(k)] = v[idx[k]];
  return out;
}

ModelPartition partition(const CurvatureSet& cs, IndexSet active) {
  const Index dim = cs.score.size();
  std::sort(active.begin(), active.end());
  if (active.empty() || active.front() != 0)
    throw ArgumentError("model index set must contain the intercept (index 0)");
  if (std::adjacent_find(active.begin(), active.end()) != active.end())
    throw ArgumentError("model index set has repeated entries");
  if (active.back() >= dim) throw ArgumentError("model index out of range");

  ModelPartition part;
  part.active = std::move(active);
  part.inactive = complement(part.active, dim);
  const auto& m = part.active;
  const auto& nm = part.inactive;
  part.score_m = subvector(cs.score, m);
  part.score_n = subvector(cs.score, nm);
  part.h_mm = submatrix(cs.hessian, m, m);
  part.h_mn = submatrix(cs.hessian, m, nm);
  part.h_nm = submatrix(cs.hessian, nm, m);
  part.h_nn = submatrix(cs.hessian, nm, nm);
  part.i_mm = submatrix(cs.information, m, m);
  part.i_mn = submatrix(cs.information, m, nm);
  part.i_nm = submatrix(cs.information, nm, m);
  part.i_nn = submatrix(cs.information, nm, nm);
  return part;
}

}  // namespace svylasso
