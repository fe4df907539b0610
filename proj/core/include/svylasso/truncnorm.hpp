#pragma once

#include <limits>

namespace svylasso {

/// N(mean, variance) restricted to [lower, upper]; either bound may be infinite.
struct TruncatedNormal {
  double mean = 0.0;
  double variance = 1.0;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();

  void validate() const;
};

/// log Φ(z), finite for every finite z.
double log_normal_cdf(double z);

/// log(Φ(hi) - Φ(lo)) for lo <= hi, evaluated on the side of zero where the
/// two tail probabilities do not cancel.
double log_normal_mass(double lo, double hi);

/// F(x) = (Φ(z_x) - Φ(z_a)) / (Φ(z_b) - Φ(z_a)). Clamps to 0 / 1 outside
/// [lower, upper]. Throws TailDegenerateError when the normalizing mass
/// underflows even in log space.
double truncnorm_cdf(const TruncatedNormal& tn, double x);

/// 1 - F(x), computed directly so small upper-tail values keep precision.
double truncnorm_sf(const TruncatedNormal& tn, double x);

struct MeanInversionOptions {
  double initial_halfwidth = 10.0;  // in standard deviations
  double cap = 1000.0;              // in standard deviations
  int max_iterations = 200;
  double tolerance = 1e-10;
};

/// Mean μ solving F(x_obs; μ, σ², a, b) = target, using that F is strictly
/// decreasing in μ. Returns -inf / +inf when the solution lies beyond the
/// bracket cap (the corresponding confidence limit is unbounded).
double invert_mean(double x_obs, double variance, double lower, double upper, double target,
                   const MeanInversionOptions& opts = {});

}  // namespace svylasso
