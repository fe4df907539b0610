#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <vector>

#include <Eigen/Dense>

#include <svylasso/dataset.hpp>
#include <svylasso/glm.hpp>
#include <svylasso/random.hpp>

namespace fixtures {

using svylasso::Dataset;
using svylasso::Index;

inline double lgt(double t) { return 1.0 / (1.0 + std::exp(-t)); }

// Logit sample with iid covariates, outcome drawn from the model at theta0 and
// positive weights in [0.5, 2.5]. Binary covariates when `binary`.
inline Dataset logit_sample(Index n, const Eigen::VectorXd& theta0, std::uint64_t seed, bool binary = false,
                            bool unit_weights = false) {
  svylasso::Rng rng(seed);
  const Index p = theta0.size() - 1;
  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd y(n), w(n);
  for (Index i = 0; i < n; ++i) {
    double eta = theta0[0];
    for (Index j = 0; j < p; ++j) {
      if (binary) {
        x(i, j) = rng.bernoulli(0.5) ? 1.0 : 0.0;
      } else {
        // Box-Muller keeps the draw portable.
        const double u1 = 1.0 - rng.uniform();
        const double u2 = rng.uniform();
        x(i, j) = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
      }
      eta += x(i, j) * theta0[j + 1];
    }
    y[i] = rng.bernoulli(lgt(eta)) ? 1.0 : 0.0;
    w[i] = unit_weights ? 1.0 : 0.5 + 2.0 * rng.uniform();
  }
  return svylasso::with_rescaled_weights(svylasso::make_dataset_with_intercept(y, x, w));
}

inline Eigen::VectorXd sparse_theta(Index p, std::initializer_list<double> lead) {
  Eigen::VectorXd t = Eigen::VectorXd::Zero(p + 1);
  Index k = 0;
  for (double v : lead) t[k++] = v;
  return t;
}

inline double standard_normal(svylasso::Rng& rng) {
  const double u1 = 1.0 - rng.uniform();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// Row-by-row oracles for the weighted logit log-likelihood and its derivatives.
inline double loglik_oracle(const Dataset& ds, const Eigen::VectorXd& th) {
  double s = 0.0;
  for (Index i = 0; i < ds.n(); ++i) {
    double t = 0.0;
    for (Index j = 0; j < ds.X.cols(); ++j) t += ds.X(i, j) * th[j];
    s -= ds.w[i] * (std::log(1.0 + std::exp(t)) - ds.y[i] * t);
  }
  return s / static_cast<double>(ds.n());
}

inline Eigen::VectorXd score_oracle(const Dataset& ds, const Eigen::VectorXd& th) {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(ds.X.cols());
  for (Index i = 0; i < ds.n(); ++i) {
    double t = 0.0;
    for (Index j = 0; j < ds.X.cols(); ++j) t += ds.X(i, j) * th[j];
    for (Index j = 0; j < ds.X.cols(); ++j) s[j] += ds.w[i] * ds.X(i, j) * (ds.y[i] - lgt(t));
  }
  return s / static_cast<double>(ds.n());
}

inline Eigen::MatrixXd hessian_oracle(const Dataset& ds, const Eigen::VectorXd& th) {
  const Index d = ds.X.cols();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d, d);
  for (Index i = 0; i < ds.n(); ++i) {
    double t = 0.0;
    for (Index j = 0; j < d; ++j) t += ds.X(i, j) * th[j];
    const double v = lgt(t) * (1.0 - lgt(t));
    for (Index a = 0; a < d; ++a)
      for (Index b = 0; b < d; ++b) h(a, b) += ds.w[i] * ds.X(i, a) * ds.X(i, b) * v;
  }
  return h / static_cast<double>(ds.n());
}

inline Eigen::MatrixXd information_oracle(const Dataset& ds, const Eigen::VectorXd& th) {
  const Index d = ds.X.cols();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
  for (Index i = 0; i < ds.n(); ++i) {
    double t = 0.0;
    for (Index j = 0; j < d; ++j) t += ds.X(i, j) * th[j];
    const double r = ds.y[i] - lgt(t);
    for (Index a = 0; a < d; ++a)
      for (Index b = 0; b < d; ++b) m(a, b) += ds.w[i] * ds.w[i] * ds.X(i, a) * ds.X(i, b) * r * r;
  }
  return m / static_cast<double>(ds.n());
}

// Central differences of a vector function; column k holds d f / d x_k.
inline Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h = 1e-5) {
  const Eigen::VectorXd f0 = f(x);
  Eigen::MatrixXd out(f0.size(), x.size());
  for (Index k = 0; k < x.size(); ++k) {
    Eigen::VectorXd a = x, b = x;
    a[k] += h;
    b[k] -= h;
    out.col(k) = (f(a) - f(b)) / (2.0 * h);
  }
  return out;
}

inline double rel_err(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

// One-sample Kolmogorov-Smirnov statistic against a continuous CDF.
inline double ks_statistic(std::vector<double> x, const std::function<double(double)>& cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

// Asymptotic Kolmogorov critical value c(alpha)/sqrt(n).
inline double ks_critical(std::size_t n, double alpha) {
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

}  // namespace fixtures
