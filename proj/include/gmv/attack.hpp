#pragma once

// What an honest-but-curious server can recover from ternary codes when it
// knows the square orthogonal transform W and the signature model
// X ~ N(0, sigma_x^2 I).

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gmv/aggregation.hpp"
#include "gmv/stc_embedding.hpp"

namespace gmv {

/// E[Z | Z > lambda] for Z ~ N(0, sigma_x^2): the value a +1 symbol decodes to.
double reconstruction_value(double lambda, double sigma_x);

/// Conditional-expectation estimate W^T z_hat with z_hat_i = s_i *
/// reconstruction_value(lambda, sigma_x). Throws UnsupportedConfiguration
/// for a non-square W and InvalidShape on a length mismatch.
Eigen::VectorXd reconstruct(const TernaryCode& code, const TransformMatrix& w, double lambda,
                            double sigma_x);

/// sigma_x^2 * (1 - exp(-lambda^2/sigma_x^2) / (pi * Phi(-lambda/sigma_x)))
double mse_closed_form(double lambda, double sigma_x);

/// sigma_x^2 * (1 - (1 - MSE(lambda)) / N), the sum-scheme enrolled MSE.
double mse_enrolled_closed_form(double lambda, double sigma_x, std::size_t n);

/// (dN)^{-1} sum_j ||x_j - x_hat||^2
double empirical_mse_e(const SignatureSet& g, const Eigen::VectorXd& x_hat);

struct ScalingBound {
  double lower_bound = 0.0;  ///< per component, attained at kappa_star
  double kappa_star = 0.0;   ///< w^T m / ||w||^2
};

/// Best achievable empirical_mse_e over estimates kappa * w.
ScalingBound scaling_attack_bound(const SignatureSet& g, const Eigen::VectorXd& w);

struct AttackReport {
  std::string scheme;
  std::size_t n = 0;
  double lambda = 0.0;
  double mse_embedding = 0.0;           ///< sigma_x^2 MSE(lambda)
  double mse_enrolled_empirical = 0.0;
  double mse_enrolled_theory = 0.0;     ///< NaN where no closed form exists
  double lower_bound = 0.0;
  double kappa_star = 0.0;
};

/// Runs the reconstruction attack against one group representative built by
/// group_representative with `params`.
///
/// HoaSum: the server decodes r at the scale of the sum, sqrt(n) sigma_x,
/// and divides by n, which estimates the group mean.
/// Other schemes: no decoder for the group mean exists, so the estimate is
/// the decoded direction u = reconstruct(r) scaled by the oracle kappa*.
/// This is the most favourable scaling for the attacker, hence
/// mse_enrolled_empirical equals lower_bound for these schemes.
AttackReport attack_group(AggregationScheme scheme, const SignatureSet& g, const TernaryCode& r,
                          const TransformMatrix& w, const EmbeddingParams& params);

void write_attack_csv_header(std::ostream& os);
void write_attack_csv_row(std::ostream& os, const AttackReport& r);

}  // namespace gmv
