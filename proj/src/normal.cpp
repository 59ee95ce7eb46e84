#include "gmv/normal.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

#include "gmv/errors.hpp"

namespace gmv::normal {

double pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

// erfc keeps full relative accuracy in the lower tail.
double cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("normal::quantile: p must lie in (0, 1)");
  }
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double pdf(double x, double sigma) {
  if (sigma == 0.0) return x == 0.0 ? INFINITY : 0.0;
  return pdf(x / sigma) / sigma;
}

double cdf(double x, double sigma) {
  if (sigma == 0.0) return x >= 0.0 ? 1.0 : 0.0;
  return cdf(x / sigma);
}

}  // namespace gmv::normal
