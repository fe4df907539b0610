#pragma once

namespace svylasso {

/// Standard normal CDF.
double normal_cdf(double z);

/// Standard normal upper tail 1 - Φ(z).
double normal_sf(double z);

/// Standard normal quantile, p in (0, 1).
double normal_quantile(double p);

/// Upper tail of the chi-square distribution with `df` degrees of freedom.
double chi_square_sf(double x, double df);

/// Chi-square quantile.
double chi_square_quantile(double p, double df);

/// Two-sided p-value 2(1 - Φ(|z|)).
double two_sided_normal_p(double z);

}  // namespace svylasso
