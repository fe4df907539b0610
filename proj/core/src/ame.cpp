#include "svylasso/ame.hpp"

#include <algorithm>
#include <memory>
#include <string>

#include "svylasso/calpha.hpp"
#include "svylasso/debiased.hpp"
#include "svylasso/errors.hpp"
#include "svylasso/selective.hpp"

namespace svylasso {

namespace {

void check_column(const Dataset& ds, const Eigen::VectorXd& theta, Index j) {
  if (j < 1 || j > ds.p()) throw ArgumentError("AME column index out of range");
  if (theta.size() != ds.X.cols()) throw ArgumentError("theta has the wrong length");
  if (!is_binary_column(ds, j)) throw ArgumentError("AME requires a binary (0/1) column; column " + std::to_string(j) + " is not");
}

double dlogistic(double t) {
  const double l = logistic(t);
  return l * logistic(-t);
}

}  // namespace

bool is_binary_column(const Dataset& ds, Index j) {
  if (j < 0 || j >= ds.X.cols()) return false;
  for (Index i = 0; i < ds.n(); ++i) {
    const double v = ds.X(i, j);
    if (v != 0.0 && v != 1.0) return false;
  }
  return true;
}

double ame_estimate(const Dataset& ds, const Eigen::VectorXd& theta, Index j) {
  check_column(ds, theta, j);
  const Eigen::VectorXd base = ds.X * theta - ds.X.col(j) * theta[j];  // linear predictor with x_j = 0
  double acc = 0.0;
  for (Index i = 0; i < ds.n(); ++i) acc += ds.w[i] * (logistic(base[i] + theta[j]) - logistic(base[i]));
  return acc / ds.w.sum();
}

Eigen::VectorXd ame_jacobian(const Dataset& ds, const Eigen::VectorXd& theta, Index j) {
  check_column(ds, theta, j);
  const Eigen::VectorXd base = ds.X * theta - ds.X.col(j) * theta[j];
  Eigen::VectorXd g = Eigen::VectorXd::Zero(theta.size());
  Eigen::RowVectorXd x1, x0;
  for (Index i = 0; i < ds.n(); ++i) {
    x1 = ds.X.row(i);
    x0 = x1;
    x1[j] = 1.0;
    x0[j] = 0.0;
    g += ds.w[i] * (x1.transpose() * dlogistic(base[i] + theta[j]) - x0.transpose() * dlogistic(base[i]));
  }
  return g / ds.w.sum();
}

Eigen::VectorXd ame_jacobian_zero_coefficient(const Dataset& ds, const Eigen::VectorXd& theta, Index j) {
  check_column(ds, theta, j);
  Eigen::VectorXd t = theta;
  t[j] = 0.0;
  const Eigen::VectorXd base = ds.X * t;
  double acc = 0.0;
  for (Index i = 0; i < ds.n(); ++i) acc += ds.w[i] * dlogistic(base[i]);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(theta.size());
  g[j] = acc / ds.w.sum();
  return g;
}

ParamFunction ame_function(const Dataset& ds, Index j) {
  if (!is_binary_column(ds, j) || j < 1) throw ArgumentError("AME requires a binary (0/1) slope column");
  auto data = std::make_shared<const Dataset>(ds);
  ParamFunction f;
  f.value = [data, j](const Eigen::VectorXd& theta) { return Eigen::VectorXd::Constant(1, ame_estimate(*data, theta, j)); };
  f.jacobian = [data, j](const Eigen::VectorXd& theta) {
    Eigen::MatrixXd m = ame_jacobian(*data, theta, j);
    return m;
  };
  f.label = "AME[" + (static_cast<std::size_t>(j) < ds.names.size() ? ds.names[static_cast<std::size_t>(j)] : std::to_string(j)) + "]";
  return f;
}

InferenceResult ame_infer(const Dataset& ds, const GlmFamily& fam, const LassoFit& fit, Index j, Method method,
                          double ame0, double level) {
  const Dataset data = has_rescaled_weights(ds) ? ds : with_rescaled_weights(ds);
  const ParamFunction rho = ame_function(data, j);
  const Eigen::VectorXd null_value = Eigen::VectorXd::Constant(1, ame0);
  switch (method) {
    case Method::db:
      return db_wald(data, fam, fit, rho, null_value, level);
    case Method::tsvy:
      return tsvy_wald(data, fam, fit_mle(data, fam), rho, null_value, level);
    case Method::calpha:
      return c_alpha_test(data, fam, auxiliary_ame_pin(data, fam, fit.theta, j, ame0), rho, level);
    case Method::si:
    case Method::si2: {
      if (std::find(fit.active.begin() + 1, fit.active.end(), j) == fit.active.end()) {
        return InferenceResult::not_applicable(method, rho.label, "variable not selected");
      }
      const SelectionEvent ev = build_selection_event(data, fam, fit);
      return si_ci_rho(augment_for_rho(ev, rho, method == Method::si), ame0, level);
    }
  }
  throw ArgumentError("unsupported method");
}

}  // namespace svylasso
