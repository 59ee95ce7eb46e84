#pragma once

// Standard normal density, CDF and quantile.

namespace gmv::normal {

double pdf(double z);
double cdf(double z);
/// Phi^{-1}(p) for p in (0, 1). Throws DomainError otherwise.
double quantile(double p);

/// Density and CDF of N(0, sigma^2). sigma == 0 gives the degenerate
/// point mass at 0 (cdf is the unit step, right-continuous).
double pdf(double x, double sigma);
double cdf(double x, double sigma);

}  // namespace gmv::normal
