#include "svylasso/stats.hpp"

#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "svylasso/errors.hpp"

namespace svylasso {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ArgumentError("normal quantile requires p in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double chi_square_sf(double x, double df) {
  if (!(df > 0.0)) throw ArgumentError("chi-square degrees of freedom must be positive");
  if (!(x > 0.0)) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<double>(df), x));
}

double chi_square_quantile(double p, double df) {
  if (!(p > 0.0 && p < 1.0)) throw ArgumentError("chi-square quantile requires p in (0, 1)");
  return boost::math::quantile(boost::math::chi_squared_distribution<double>(df), p);
}

double two_sided_normal_p(double z) {
  if (std::isnan(z)) return z;
  return std::min(1.0, 2.0 * normal_sf(std::abs(z)));
}

}  // namespace svylasso
