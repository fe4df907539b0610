#include "svylasso/truncnorm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "svylasso/errors.hpp"

namespace svylasso {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Below this point erfc loses relative accuracy to underflow; switch to the
// asymptotic Mills-ratio expansion.
constexpr double kAsymptoticCut = -37.0;

// log(1 - e^x) for x <= 0.
double log1m_exp(double x) {
  if (x >= 0.0) return -kInf;
  return x > -std::numbers::ln2 ? std::log(-std::expm1(x)) : std::log1p(-std::exp(x));
}

}  // namespace

void TruncatedNormal::validate() const {
  if (!(variance > 0.0) || !std::isfinite(variance))
    throw ArgumentError("truncated normal variance must be positive and finite");
  if (!(lower < upper)) throw ArgumentError("truncated normal requires lower < upper");
  if (!std::isfinite(mean)) throw ArgumentError("truncated normal mean must be finite");
}

double log_normal_cdf(double z) {
  if (std::isnan(z)) return z;
  if (z == -kInf) return -kInf;
  if (z >= kAsymptoticCut) {
    if (z > 5.0) return std::log1p(-0.5 * std::erfc(z / std::numbers::sqrt2));
    return std::log(0.5 * std::erfc(-z / std::numbers::sqrt2));
  }
  // Φ(z) = φ(z)/|z| · (1 - 1/z² + 3/z⁴ - 15/z⁶ + ...), |z| > 37.
  const double u = 1.0 / (z * z);
  double term = 1.0;
  double series = 1.0;
  for (int k = 1; k <= 8; ++k) {
    term *= -static_cast<double>(2 * k - 1) * u;
    series += term;
  }
  return -0.5 * z * z - std::log(-z) - 0.5 * std::log(2.0 * std::numbers::pi) + std::log(series);
}

double log_normal_mass(double lo, double hi) {
  if (!(lo <= hi)) throw ArgumentError("log_normal_mass requires lo <= hi");
  if (lo == hi) return -kInf;
  if (hi <= 0.0) {
    const double l_hi = log_normal_cdf(hi);
    return l_hi + log1m_exp(log_normal_cdf(lo) - l_hi);
  }
  if (lo >= 0.0) {
    const double l_lo = log_normal_cdf(-lo);
    return l_lo + log1m_exp(log_normal_cdf(-hi) - l_lo);
  }
  // Straddles zero: erf values have opposite signs so nothing cancels.
  return std::log(0.5 * (std::erf(hi / std::numbers::sqrt2) - std::erf(lo / std::numbers::sqrt2)));
}

namespace {

struct Standardized {
  double za, zx, zb, log_mass;
};

Standardized standardize(const TruncatedNormal& tn, double x) {
  tn.validate();
  const double sd = std::sqrt(tn.variance);
  Standardized s{(tn.lower - tn.mean) / sd, (x - tn.mean) / sd, (tn.upper - tn.mean) / sd, 0.0};
  s.log_mass = log_normal_mass(s.za, s.zb);
  if (!std::isfinite(s.log_mass))
    throw TailDegenerateError("truncation interval carries no representable probability mass");
  return s;
}

}  // namespace

double truncnorm_cdf(const TruncatedNormal& tn, double x) {
  tn.validate();
  if (x <= tn.lower) return 0.0;
  if (x >= tn.upper) return 1.0;
  const Standardized s = standardize(tn, x);
  return std::clamp(std::exp(log_normal_mass(s.za, s.zx) - s.log_mass), 0.0, 1.0);
}

double truncnorm_sf(const TruncatedNormal& tn, double x) {
  tn.validate();
  if (x <= tn.lower) return 1.0;
  if (x >= tn.upper) return 0.0;
  const Standardized s = standardize(tn, x);
  return std::clamp(std::exp(log_normal_mass(s.zx, s.zb) - s.log_mass), 0.0, 1.0);
}

double invert_mean(double x_obs, double variance, double lower, double upper, double target,
                   const MeanInversionOptions& opts) {
  if (!(target > 0.0 && target < 1.0)) throw ArgumentError("inversion target must lie in (0, 1)");
  if (!(variance > 0.0)) throw ArgumentError("inversion variance must be positive");
  if (!(lower < x_obs && x_obs < upper))
    throw ArgumentError("observed value must lie strictly inside the truncation interval");

  const double sd = std::sqrt(variance);
  // g(μ) = F(x_obs; μ) - target is strictly decreasing in μ.
  auto g = [&](double mu) {
    return truncnorm_cdf(TruncatedNormal{mu, variance, lower, upper}, x_obs) - target;
  };

  double lo = x_obs - opts.initial_halfwidth * sd;
  double hi = x_obs + opts.initial_halfwidth * sd;
  const double lo_cap = x_obs - opts.cap * sd;
  const double hi_cap = x_obs + opts.cap * sd;

  double width = opts.initial_halfwidth;
  while (g(lo) < 0.0) {
    if (lo <= lo_cap) return -kInf;
    width *= 2.0;
    lo = std::max(x_obs - width * sd, lo_cap);
  }
  width = opts.initial_halfwidth;
  while (g(hi) > 0.0) {
    if (hi >= hi_cap) return kInf;
    width *= 2.0;
    hi = std::min(x_obs + width * sd, hi_cap);
  }

  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < opts.max_iterations; ++it) {
    mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if (gm == 0.0) return mid;
    if (gm > 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-15 * std::max(1.0, std::abs(mid)) && std::abs(gm) < opts.tolerance) break;
    if (hi <= lo) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace svylasso
