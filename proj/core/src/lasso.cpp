#include "svylasso/lasso.hpp"

#include <algorithm>
#include <optional>

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "svylasso/errors.hpp"
#include "svylasso/random.hpp"

namespace svylasso {

namespace {

constexpr double kCurvatureFloor = 1e-10;
constexpr double kInnerTol = 1e-12;
constexpr double kArmijo = 1e-4;
constexpr int kMaxHalvings = 50;
constexpr double kPolishTol = 1e-6;
constexpr int kMaxPolish = 4;

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

double penalty_value(const Eigen::VectorXd& theta, const Eigen::VectorXd& pf) {
  return pf.cwiseProduct(theta.cwiseAbs()).sum();
}

// n⁻¹ Σ w g(y, η) on rescaled weights.
double smooth_loss(const Dataset& ds, const GlmFamily& fam, const Eigen::VectorXd& eta) {
  double total = 0.0;
  for (Index i = 0; i < ds.n(); ++i) total += ds.w[i] * fam.loss(ds.y[i], eta[i]);
  return total / static_cast<double>(ds.n());
}

struct SolveResult {
  Eigen::VectorXd theta;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;
};

// Proximal Newton: quadratic model of the smooth loss at the current iterate,
// minimized with cyclic coordinate descent (soft-thresholded slopes, exact
// intercept), then an Armijo backtracking step on the full objective.
SolveResult solve(const Dataset& ds, const GlmFamily& fam, double lambda, const Eigen::VectorXd& pf,
                  const LassoOptions& opts, Eigen::VectorXd theta) {
  const Index n = ds.n();
  const Index d = ds.X.cols();
  const double inv_n = 1.0 / static_cast<double>(n);

  SolveResult out;
  Eigen::VectorXd eta = ds.X * theta;
  double objective = smooth_loss(ds, fam, eta) + lambda * penalty_value(theta, pf);
  if (!std::isfinite(objective)) throw NumericError("penalized objective is not finite at the start point");

  Eigen::VectorXd gd(n), hv(n), grad(d), curv(d), r(n), trial(d), eta_trial(n);
  Eigen::MatrixXd hx(n, d), xc(n, d);
  Eigen::VectorXd center(d), theta_t(d);
  std::vector<Index> cycle;
  cycle.reserve(static_cast<std::size_t>(d));

  for (int outer = 1; outer <= opts.max_outer; ++outer) {
    out.iterations = outer;
    for (Index i = 0; i < n; ++i) {
      gd[i] = ds.w[i] * fam.d1(ds.y[i], eta[i]) * inv_n;
      hv[i] = ds.w[i] * std::max(fam.d2(ds.y[i], eta[i]), kCurvatureFloor) * inv_n;
    }
    // Slopes centered at their curvature-weighted means decouple the
    // intercept from the slopes in the quadratic model; the intercept is
    // shifted accordingly and mapped back after the inner solve.
    const double hsum = hv.sum();
    xc = ds.X;
    center.setZero();
    if (pf[0] == 0.0 && hsum > 0.0) {
      for (Index j = 1; j < d; ++j) {
        center[j] = hv.dot(ds.X.col(j)) / hsum;
        xc.col(j).array() -= center[j];
      }
    }
    grad.noalias() = xc.transpose() * gd;
    for (Index j = 0; j < d; ++j) curv[j] = hv.dot(xc.col(j).cwiseAbs2());
    theta_t = theta;
    theta_t[0] += center.tail(d - 1).dot(theta.tail(d - 1));

    hx = xc.array().colwise() * hv.array();
    trial = theta_t;
    r.setZero();
    auto update = [&](Index j) {
      if (!(curv[j] > 0.0)) return 0.0;
      const double g = grad[j] + hx.col(j).dot(r);
      const double old = trial[j];
      const double z = curv[j] * old - g;
      const double cand = (pf[j] == 0.0 ? z : soft_threshold(z, lambda * pf[j])) / curv[j];
      const double diff = cand - old;
      if (diff == 0.0) return 0.0;
      trial[j] = cand;
      r.noalias() += diff * xc.col(j);
      return std::abs(diff);
    };

    // Exact minimizer of the quadratic model on the current support and
    // signs. Accepted only if it keeps the signs and the off-support
    // subgradient bounds, i.e. it solves the model problem.
    auto polish = [&]() {
      cycle.clear();
      for (Index j = 0; j < d; ++j)
        if (pf[j] == 0.0 || trial[j] != 0.0) cycle.push_back(j);
      const auto m = static_cast<Index>(cycle.size());
      if (m == 0 || m > n) return false;
      Eigen::MatrixXd xa(n, m), ha(n, m);
      Eigen::VectorXd rhs(m);
      for (Index k = 0; k < m; ++k) {
        const Index j = cycle[static_cast<std::size_t>(k)];
        xa.col(k) = xc.col(j);
        ha.col(k) = hx.col(j);
        const double sgn = trial[j] > 0.0 ? 1.0 : -1.0;
        rhs[k] = -grad[j] - (pf[j] == 0.0 ? 0.0 : lambda * pf[j] * sgn);
      }
      // δ_{-A} = -θ_{-A}; its contribution to the model gradient on A.
      Eigen::VectorXd shift = -theta_t;
      for (Index j : cycle) shift[j] = 0.0;
      const Eigen::VectorXd base_eta = xc * shift;
      rhs.noalias() -= ha.transpose() * base_eta;
      const Eigen::MatrixXd q = xa.transpose() * ha;
      Eigen::LLT<Eigen::MatrixXd> llt(q);
      if (llt.info() != Eigen::Success) return false;
      const Eigen::VectorXd delta = llt.solve(rhs);
      if (!delta.allFinite()) return false;
      Eigen::VectorXd cand = Eigen::VectorXd::Zero(d);
      for (Index k = 0; k < m; ++k) {
        const Index j = cycle[static_cast<std::size_t>(k)];
        cand[j] = theta_t[j] + delta[k];
        if (pf[j] != 0.0 && (cand[j] > 0.0) != (trial[j] > 0.0)) return false;
        if (pf[j] != 0.0 && cand[j] == 0.0) return false;
      }
      const Eigen::VectorXd new_r = xc * (cand - theta_t);
      const Eigen::VectorXd model_grad = grad + hx.transpose() * new_r;
      for (Index j = 0; j < d; ++j) {
        if (pf[j] == 0.0 || cand[j] != 0.0) continue;
        if (std::abs(model_grad[j]) > lambda * pf[j] * (1.0 + 1e-10)) return false;
      }
      trial = cand;
      r = new_r;
      return true;
    };

    // The previous support usually survives a Newton step, so try the exact
    // solve on it first. Otherwise run coordinate descent (full sweeps, then
    // cycles over the support) and retry the exact solve once the sweeps
    // settle.
    int sweeps = 0;
    int attempts = 0;
    auto try_polish = [&]() {
      if (attempts >= kMaxPolish) return false;
      ++attempts;
      const IndexSet saved = cycle;
      const bool ok = polish();
      cycle = saved;
      return ok;
    };
    bool exact = try_polish();
    while (!exact && sweeps < opts.max_inner) {
      double change = 0.0;
      for (Index j = 0; j < d; ++j) change = std::max(change, update(j));
      ++sweeps;
      if (change < kInnerTol) break;
      cycle.clear();
      for (Index j = 0; j < d; ++j)
        if (pf[j] == 0.0 || trial[j] != 0.0) cycle.push_back(j);
      while (sweeps < opts.max_inner) {
        double c = 0.0;
        for (Index j : cycle) c = std::max(c, update(j));
        ++sweeps;
        if (c < kInnerTol) break;
        if (c < kPolishTol && try_polish()) {
          exact = true;
          break;
        }
      }
    }

    trial[0] -= center.tail(d - 1).dot(trial.tail(d - 1));

    const Eigen::VectorXd direction = trial - theta;
    const double predicted = gd.dot(r) + lambda * (penalty_value(trial, pf) - penalty_value(theta, pf));

    double step = 1.0;
    bool accepted = false;
    double new_objective = objective;
    for (int h = 0; h < kMaxHalvings; ++h) {
      eta_trial = eta + step * r;
      const Eigen::VectorXd cand = step == 1.0 ? trial : Eigen::VectorXd(theta + step * direction);
      const double value = smooth_loss(ds, fam, eta_trial) + lambda * penalty_value(cand, pf);
      if (std::isfinite(value) && value <= objective + kArmijo * step * std::min(predicted, 0.0)) {
        accepted = true;
        new_objective = value;
        theta = cand;
        break;
      }
      step *= 0.5;
    }

    const double max_move = accepted ? (step * direction).cwiseAbs().maxCoeff() : 0.0;
    if (accepted) {
      eta = ds.X * theta;
      objective = new_objective;
    }
    out.trace.push_back(objective);
    if (max_move < opts.tol_change) {
      out.converged = true;
      break;
    }
  }
  out.theta = std::move(theta);
  return out;
}

LassoFit make_fit(const Dataset& ds, const GlmFamily& fam, double lambda, Eigen::VectorXd pf, SolveResult res) {
  LassoFit fit;
  fit.theta = std::move(res.theta);
  fit.lambda = lambda;
  fit.penalty = std::move(pf);
  fit.iterations = res.iterations;
  fit.converged = res.converged;
  fit.objective_trace = std::move(res.trace);
  fit.active.push_back(0);
  for (Index j = 1; j < fit.theta.size(); ++j) {
    if (fit.theta[j] != 0.0) {
      fit.active.push_back(j);
      fit.signs.push_back(fit.theta[j] > 0.0 ? 1 : -1);
    }
  }
  const IndexSet inactive = complement(fit.active, fit.theta.size());
  fit.inactive_subgradient.resize(static_cast<Index>(inactive.size()));
  if (!inactive.empty()) {
    const Eigen::VectorXd s = score(ds, fam, fit.theta);
    for (std::size_t k = 0; k < inactive.size(); ++k) {
      const double scale = lambda * fit.penalty[inactive[k]];
      fit.inactive_subgradient[static_cast<Index>(k)] = scale > 0.0 ? s[inactive[k]] / scale : 0.0;
    }
  }
  return fit;
}

const Dataset& rescaled(const Dataset& ds, std::optional<Dataset>& holder) {
  if (has_rescaled_weights(ds)) return ds;
  holder = with_rescaled_weights(ds);
  return *holder;
}

}  // namespace

double penalized_objective(const Dataset& ds, const GlmFamily& fam, const Eigen::VectorXd& theta,
                           double lambda, const Eigen::VectorXd& penalty) {
  std::optional<Dataset> holder;
  const Dataset& data = rescaled(ds, holder);
  return -weighted_loglik(data, fam, theta) + lambda * penalty_value(theta, penalty);
}

Eigen::VectorXd penalty_factors(const Dataset& ds, bool standardize) {
  Eigen::VectorXd pf = Eigen::VectorXd::Ones(ds.X.cols());
  pf[0] = 0.0;
  if (standardize) {
    const double wsum = ds.w.sum();
    for (Index j = 1; j < ds.X.cols(); ++j) {
      const double mean = ds.w.dot(ds.X.col(j)) / wsum;
      const double var = ds.w.dot((ds.X.col(j).array() - mean).square().matrix()) / wsum;
      if (!(var > 0.0)) throw ArgumentError("cannot standardize constant column " + std::to_string(j));
      pf[j] = std::sqrt(var);
    }
  }
  return pf;
}

Eigen::VectorXd fit_intercept_only(const Dataset& ds, const GlmFamily& fam) {
  std::optional<Dataset> holder;
  const Dataset& data = rescaled(ds, holder);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(data.X.cols());
  double alpha = 0.0;
  for (int it = 0; it < 200; ++it) {
    double g = 0.0, h = 0.0;
    for (Index i = 0; i < data.n(); ++i) {
      g += data.w[i] * fam.d1(data.y[i], alpha);
      h += data.w[i] * fam.d2(data.y[i], alpha);
    }
    if (!(h > 0.0) || std::abs(alpha) > 50.0)
      throw DataError("intercept-only fit diverges; the outcome is (nearly) constant");
    const double step = g / h;
    alpha -= std::clamp(step, -5.0, 5.0);
    if (std::abs(step) < 1e-13 * std::max(1.0, std::abs(alpha))) {
      theta[0] = alpha;
      return theta;
    }
  }
  throw DataError("intercept-only fit did not converge");
}

double lambda_max(const Dataset& ds, const GlmFamily& fam, const LassoOptions& opts) {
  std::optional<Dataset> holder;
  const Dataset& data = rescaled(ds, holder);
  const Eigen::VectorXd pf = penalty_factors(data, opts.standardize);
  const Eigen::VectorXd s = score(data, fam, fit_intercept_only(data, fam));
  double best = 0.0;
  for (Index j = 1; j < s.size(); ++j)
    if (pf[j] > 0.0) best = std::max(best, std::abs(s[j]) / pf[j]);
  return best;
}

LassoFit fit_penalized(const Dataset& ds, const GlmFamily& fam, double lambda, const LassoOptions& opts,
                       const Eigen::VectorXd* warm_start) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ArgumentError("lambda must be a finite value >= 0");
  std::optional<Dataset> holder;
  const Dataset& data = rescaled(ds, holder);
  for (Index j = 1; j < data.X.cols(); ++j)
    if (data.X.col(j).isZero(0.0)) throw ArgumentError("design column " + std::to_string(j) + " is identically zero");

  Eigen::VectorXd pf = penalty_factors(data, opts.standardize);
  Eigen::VectorXd start;
  if (warm_start != nullptr) {
    if (warm_start->size() != data.X.cols()) throw ArgumentError("warm start has the wrong length");
    start = *warm_start;
  } else {
    start = fit_intercept_only(data, fam);
  }
  SolveResult res = solve(data, fam, lambda, pf, opts, std::move(start));
  if (!res.converged)
    throw ConvergenceError("lasso solver did not converge in " + std::to_string(opts.max_outer) +
                               " outer iterations (lambda=" + std::to_string(lambda) + ")",
                           res.theta);
  return make_fit(data, fam, lambda, std::move(pf), std::move(res));
}

KktReport kkt_certificate(const Dataset& ds, const GlmFamily& fam, const LassoFit& fit, double tol_kkt) {
  std::optional<Dataset> holder;
  const Dataset& data = rescaled(ds, holder);
  const Eigen::VectorXd s = score(data, fam, fit.theta);
  const Eigen::VectorXd pf =
      fit.penalty.size() == fit.theta.size() ? fit.penalty : penalty_factors(data, false);
  const double lam = fit.lambda;

  KktReport rep;
  rep.subgradient = Eigen::VectorXd::Zero(s.size());
  rep.intercept_residual = std::abs(s[0]);
  rep.max_inactive_excess = -std::numeric_limits<double>::infinity();
  bool ok = rep.intercept_residual <= tol_kkt;
  for (Index j = 1; j < s.size(); ++j) {
    const double scale = lam * pf[j];
    if (fit.theta[j] != 0.0) {
      const double sgn = fit.theta[j] > 0.0 ? 1.0 : -1.0;
      const double resid = std::abs(s[j] - scale * sgn);
      rep.subgradient[j] = sgn;
      rep.max_active_residual = std::max(rep.max_active_residual, resid);
      if (resid > tol_kkt * std::max(lam, 1.0)) ok = false;
    } else {
      const double excess = std::abs(s[j]) - scale;
      rep.subgradient[j] = scale > 0.0 ? s[j] / scale : 0.0;
      rep.max_inactive_excess = std::max(rep.max_inactive_excess, excess);
      if (excess > (scale > 0.0 ? scale * tol_kkt : tol_kkt)) ok = false;
    }
  }
  if (!std::isfinite(rep.max_inactive_excess)) rep.max_inactive_excess = 0.0;
  rep.satisfied = ok;
  return rep;
}

std::vector<LassoFit> fit_path(const Dataset& ds, const GlmFamily& fam, const std::vector<double>& grid,
                               const LassoOptions& opts, bool early_stop, std::size_t* path_length) {
  std::optional<Dataset> holder;
  const Dataset& data = rescaled(ds, holder);
  Eigen::VectorXd pf = penalty_factors(data, opts.standardize);
  Eigen::VectorXd theta = fit_intercept_only(data, fam);

  const double null_dev = smooth_loss(data, fam, data.X * theta);
  double prev_ratio = 0.0;
  std::vector<LassoFit> path;
  path.reserve(grid.size());
  std::size_t fitted = grid.size();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (k > 0 && !(grid[k] < grid[k - 1])) throw ArgumentError("lambda grid must be strictly decreasing");
    SolveResult res = solve(data, fam, grid[k], pf, opts, theta);
    theta = res.theta;
    path.push_back(make_fit(data, fam, grid[k], pf, std::move(res)));
    if (!early_stop) continue;
    const double ratio = 1.0 - smooth_loss(data, fam, data.X * theta) / null_dev;
    // glmnet's path rules: at least 5 fits, then stop on saturation or stall.
    if (k + 1 >= 5 && (ratio > 0.999 || ratio - prev_ratio < 1e-5)) {
      fitted = k + 1;
      for (std::size_t rest = k + 1; rest < grid.size(); ++rest) {
        path.push_back(path.back());
        path.back().lambda = grid[rest];
      }
      break;
    }
    prev_ratio = ratio;
  }
  if (path_length != nullptr) *path_length = fitted;
  return path;
}

std::vector<double> default_lambda_grid(const Dataset& ds, const GlmFamily& fam, int count, double min_ratio,
                                        const LassoOptions& opts) {
  if (count < 1) throw ArgumentError("lambda grid needs at least one point");
  const double top = lambda_max(ds, fam, opts);
  if (!(top > 0.0)) return {0.0};
  if (!(min_ratio > 0.0)) min_ratio = ds.n() > ds.X.cols() ? 1e-4 : 1e-2;
  std::vector<double> grid(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const double frac = count == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(count - 1);
    grid[static_cast<std::size_t>(k)] = top * std::pow(min_ratio, frac);
  }
  return grid;
}

double weighted_auc(const Eigen::VectorXd& y, const Eigen::VectorXd& score, const Eigen::VectorXd& w) {
  std::vector<Index> order(static_cast<std::size_t>(y.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) { return score[a] < score[b]; });
  double neg_below = 0.0, num = 0.0, wpos = 0.0, wneg = 0.0;
  std::size_t k = 0;
  while (k < order.size()) {
    std::size_t end = k;
    double gp = 0.0, gn = 0.0;
    while (end < order.size() && score[order[end]] == score[order[k]]) {
      const Index i = order[end];
      (y[i] > 0.5 ? gp : gn) += w[i];
      ++end;
    }
    num += gp * (neg_below + 0.5 * gn);
    neg_below += gn;
    wpos += gp;
    wneg += gn;
    k = end;
  }
  if (!(wpos > 0.0 && wneg > 0.0)) throw DataError("AUC needs both outcome classes");
  return num / (wpos * wneg);
}

namespace {

bool fold_has_both_classes(const Eigen::VectorXd& y, const std::vector<int>& fold_of, int fold, bool inside) {
  bool pos = false, neg = false;
  for (Index i = 0; i < y.size(); ++i) {
    if ((fold_of[static_cast<std::size_t>(i)] == fold) != inside) continue;
    (y[i] > 0.5 ? pos : neg) = true;
  }
  return pos && neg;
}

}  // namespace

CvResult cv_select_lambda(const Dataset& ds, const GlmFamily& fam, const CvSpec& spec) {
  if (spec.folds < 2) throw ArgumentError("cross-validation needs at least 2 folds");
  if (spec.folds > ds.n()) throw ArgumentError("more folds than observations");
  std::optional<Dataset> holder;
  const Dataset& data = rescaled(ds, holder);

  CvResult out;
  std::vector<LassoFit> full_path;
  if (spec.grid.empty()) {
    const std::vector<double> grid = default_lambda_grid(data, fam, 100, -1.0, spec.lasso);
    std::size_t used = grid.size();
    full_path = fit_path(data, fam, grid, spec.lasso, true, &used);
    out.grid.assign(grid.begin(), grid.begin() + static_cast<std::ptrdiff_t>(used));
    full_path.resize(used);
  } else {
    out.grid = spec.grid;
    for (double v : out.grid)
      if (!(v >= 0.0)) throw ArgumentError("lambda grid values must be >= 0");
    std::sort(out.grid.begin(), out.grid.end(), std::greater<>());
    out.grid.erase(std::unique(out.grid.begin(), out.grid.end()), out.grid.end());
    full_path = fit_path(data, fam, out.grid, spec.lasso, false);
  }
  const std::size_t g = out.grid.size();
  const int k_folds = spec.folds;

  // Fold labels: a shuffled balanced assignment, redrawn until every
  // training and test fold contains both outcome classes.
  std::vector<int> fold_of(static_cast<std::size_t>(data.n()));
  bool ok = false;
  for (int attempt = 0; attempt <= spec.max_redraws && !ok; ++attempt) {
    Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(attempt)));
    for (Index i = 0; i < data.n(); ++i) fold_of[static_cast<std::size_t>(i)] = static_cast<int>(i % k_folds);
    for (std::size_t i = fold_of.size(); i > 1; --i) std::swap(fold_of[i - 1], fold_of[rng.below(i)]);
    ok = true;
    for (int f = 0; f < k_folds && ok; ++f)
      ok = fold_has_both_classes(data.y, fold_of, f, false) &&
           (spec.loss != CvLoss::auc || fold_has_both_classes(data.y, fold_of, f, true));
    out.redraws = attempt;
  }
  if (!ok) {
    // Rare outcome class: deal each class round-robin over the folds.
    Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(spec.max_redraws) + 1));
    int next = 0;
    for (const double cls : {0.0, 1.0}) {
      std::vector<Index> rows;
      for (Index i = 0; i < data.n(); ++i)
        if ((data.y[i] > 0.5) == (cls > 0.5)) rows.push_back(i);
      for (std::size_t i = rows.size(); i > 1; --i) std::swap(rows[i - 1], rows[rng.below(i)]);
      for (const Index i : rows) fold_of[static_cast<std::size_t>(i)] = next++ % k_folds;
    }
    ok = true;
    for (int f = 0; f < k_folds && ok; ++f)
      ok = fold_has_both_classes(data.y, fold_of, f, false) &&
           (spec.loss != CvLoss::auc || fold_has_both_classes(data.y, fold_of, f, true));
    out.redraws = spec.max_redraws + 1;
  }
  if (!ok) throw DataError("could not draw folds with both outcome classes in every fold");

  std::vector<std::vector<double>> fold_score(static_cast<std::size_t>(k_folds), std::vector<double>(g));
  std::vector<double> fold_weight(static_cast<std::size_t>(k_folds), 0.0);
  for (int f = 0; f < k_folds; ++f) {
    std::vector<Index> train, test;
    for (Index i = 0; i < data.n(); ++i) (fold_of[static_cast<std::size_t>(i)] == f ? test : train).push_back(i);
    const Dataset tr = select_rows(data, train);
    const Dataset te = select_rows(data, test);
    const std::vector<LassoFit> path = fit_path(tr, fam, out.grid, spec.lasso, spec.grid.empty());
    fold_weight[static_cast<std::size_t>(f)] = te.w.sum();
    for (std::size_t k = 0; k < g; ++k) {
      const Eigen::VectorXd eta = te.X * path[k].theta;
      double value;
      if (spec.loss == CvLoss::auc) {
        value = weighted_auc(te.y, eta, te.w);
      } else {
        double dev = 0.0;
        for (Index i = 0; i < te.n(); ++i) dev += 2.0 * te.w[i] * fam.loss(te.y[i], eta[i]);
        value = dev / te.w.sum();
      }
      fold_score[static_cast<std::size_t>(f)][k] = value;
    }
  }

  const double wtot = std::accumulate(fold_weight.begin(), fold_weight.end(), 0.0);
  out.mean_score.assign(g, 0.0);
  out.std_error.assign(g, 0.0);
  for (std::size_t k = 0; k < g; ++k) {
    double m = 0.0;
    for (int f = 0; f < k_folds; ++f) m += fold_weight[static_cast<std::size_t>(f)] * fold_score[static_cast<std::size_t>(f)][k];
    m /= wtot;
    double v = 0.0;
    for (int f = 0; f < k_folds; ++f) {
      const double dlt = fold_score[static_cast<std::size_t>(f)][k] - m;
      v += fold_weight[static_cast<std::size_t>(f)] * dlt * dlt;
    }
    out.mean_score[k] = m;
    out.std_error[k] = std::sqrt(v / wtot / static_cast<double>(k_folds - 1));
  }

  std::size_t best = 0;
  for (std::size_t k = 1; k < g; ++k) {
    const bool better = spec.loss == CvLoss::auc ? out.mean_score[k] > out.mean_score[best]
                                                 : out.mean_score[k] < out.mean_score[best];
    if (better) best = k;
  }
  out.best_index = best;
  out.one_se_index = best;
  for (std::size_t k = 0; k < best; ++k) {
    const double gap = spec.loss == CvLoss::auc ? out.mean_score[best] - out.mean_score[k]
                                                : out.mean_score[k] - out.mean_score[best];
    if (gap <= out.std_error[best]) {
      out.one_se_index = k;
      break;
    }
  }
  out.chosen_index = spec.rule == CvRule::best ? out.best_index : out.one_se_index;
  out.lambda = out.grid[out.chosen_index];
  out.fold_of = std::move(fold_of);

  LassoFit chosen = full_path[out.chosen_index];
  if (!chosen.converged) chosen = fit_penalized(data, fam, out.lambda, spec.lasso, &chosen.theta);
  out.fit = std::move(chosen);
  return out;
}

}  // namespace svylasso
