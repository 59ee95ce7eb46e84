#include "gmv/attack.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include <fmt/format.h>

#include "gmv/errors.hpp"
#include "gmv/normal.hpp"

namespace gmv {

namespace {

void check_sigma(double sigma_x, const char* who) {
  if (!(sigma_x > 0.0)) throw DomainError(std::string(who) + ": sigma_x must be > 0");
}

}  // namespace

double reconstruction_value(double lambda, double sigma_x) {
  check_sigma(sigma_x, "reconstruction_value");
  const double t = lambda / sigma_x;
  const double p1 = normal::cdf(-t);
  return sigma_x * std::exp(-0.5 * t * t) / (p1 * std::sqrt(2.0 * std::numbers::pi));
}

Eigen::VectorXd reconstruct(const TernaryCode& code, const TransformMatrix& w, double lambda,
                            double sigma_x) {
  if (!w.square()) throw UnsupportedConfiguration("reconstruct: transform must be square");
  if (code.size() != w.rows()) throw InvalidShape("reconstruct: code length differs from transform");
  const double v = reconstruction_value(lambda, sigma_x);
  Eigen::VectorXd z(static_cast<Eigen::Index>(code.size()));
  for (std::size_t i = 0; i < code.size(); ++i) z[static_cast<Eigen::Index>(i)] = v * code[i];
  return w.matrix().transpose() * z;
}

double mse_closed_form(double lambda, double sigma_x) {
  check_sigma(sigma_x, "mse_closed_form");
  if (!(lambda >= 0.0)) throw DomainError("mse_closed_form: lambda must be >= 0");
  const double t = lambda / sigma_x;
  const double p1 = normal::cdf(-t);
  if (p1 == 0.0) return sigma_x * sigma_x;
  return sigma_x * sigma_x * (1.0 - std::exp(-t * t) / (std::numbers::pi * p1));
}

double mse_enrolled_closed_form(double lambda, double sigma_x, std::size_t n) {
  if (n == 0) throw DomainError("mse_enrolled_closed_form: N must be >= 1");
  const double unit = mse_closed_form(lambda, sigma_x) / (sigma_x * sigma_x);
  return sigma_x * sigma_x * (1.0 - (1.0 - unit) / static_cast<double>(n));
}

double empirical_mse_e(const SignatureSet& g, const Eigen::VectorXd& x_hat) {
  if (static_cast<std::size_t>(x_hat.size()) != g.dim()) {
    throw InvalidShape("empirical_mse_e: estimate dimension differs from signatures");
  }
  const double total = (g.matrix().colwise() - x_hat).squaredNorm();
  return total / (static_cast<double>(g.dim()) * static_cast<double>(g.count()));
}

ScalingBound scaling_attack_bound(const SignatureSet& g, const Eigen::VectorXd& w) {
  if (static_cast<std::size_t>(w.size()) != g.dim()) {
    throw InvalidShape("scaling_attack_bound: direction dimension differs from signatures");
  }
  const double w_sq = w.squaredNorm();
  if (!(w_sq > 0.0)) throw DomainError("scaling_attack_bound: direction must be non-zero");
  const Eigen::VectorXd m = g.mean();
  const double wm = w.dot(m);
  const double mean_sq = g.matrix().squaredNorm() / static_cast<double>(g.count());
  ScalingBound out;
  out.kappa_star = wm / w_sq;
  out.lower_bound = std::max(0.0, mean_sq - wm * wm / w_sq) / static_cast<double>(g.dim());
  return out;
}

AttackReport attack_group(AggregationScheme scheme, const SignatureSet& g, const TernaryCode& r,
                          const TransformMatrix& w, const EmbeddingParams& params) {
  AttackReport rep;
  rep.scheme = std::string(to_string(scheme));
  rep.n = g.count();
  rep.lambda = params.lambda;
  rep.mse_embedding = mse_closed_form(params.lambda, params.sigma_x);
  rep.mse_enrolled_theory = std::numeric_limits<double>::quiet_NaN();

  const Eigen::VectorXd u = reconstruct(r, w, params.lambda, params.sigma_x);
  if (u.squaredNorm() > 0.0) {
    const ScalingBound b = scaling_attack_bound(g, u);
    rep.lower_bound = b.lower_bound;
    rep.kappa_star = b.kappa_star;
  } else {
    // All-zero code: the only estimate is the origin.
    rep.lower_bound = empirical_mse_e(g, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.dim())));
  }

  if (scheme == AggregationScheme::HoaSum) {
    const double n = static_cast<double>(g.count());
    // rec at scale sqrt(n) sigma_x, divided by n.
    rep.mse_enrolled_empirical = empirical_mse_e(g, u / std::sqrt(n));
    rep.mse_enrolled_theory = mse_enrolled_closed_form(params.lambda, params.sigma_x, g.count());
  } else {
    rep.mse_enrolled_empirical = rep.lower_bound;
  }
  return rep;
}

void write_attack_csv_header(std::ostream& os) {
  os << "scheme,N,lambda,mse_embedding,mse_enrolled_empirical,mse_enrolled_theory,lower_bound\n";
}

void write_attack_csv_row(std::ostream& os, const AttackReport& r) {
  os << fmt::format("{},{},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g}\n", r.scheme, r.n, r.lambda,
                    r.mse_embedding, r.mse_enrolled_empirical, r.mse_enrolled_theory, r.lower_bound);
}

}  // namespace gmv
