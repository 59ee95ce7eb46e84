#pragma once

// Bloom-filter baseline over ternary codes: the code must survive the query
// noise exactly, so (lambda, l) trade code survival against entropy and the
// risk of all-zero codes.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "gmv/stc_embedding.hpp"

namespace gmv {

/// Adaptive Simpson quadrature of f on [a, b] to absolute tolerance `tol`.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth = 50);

enum class EntropyForm {
  kAsPrinted,  ///< -2p log(2p) - (1-2p) log(1-2p) per symbol
  kTernary,    ///< -2p log(p) - (1-2p) log(1-2p) per symbol
};

struct ChannelStats {
  double entropy = 0.0;  ///< H(lambda, l), nats
  double pi0 = 0.0;      ///< Pr(h(X) = 0_l)
  double pi = 0.0;       ///< Pr(h(X + n) = h(X)) = p_s^l
  double p = 0.0;        ///< Pr(symbol = +1) = Phi(-lambda/sigma_x)
  double p_s = 0.0;      ///< per-symbol survival probability
};

/// Per-symbol probability that thresholding X + n gives the same symbol as
/// X, for X ~ N(0, sigma_x^2), n ~ N(0, sigma_n^2):
///   2 int_lambda^inf phi(x) (1 - Phi_n(lambda - x)) dx
///   + int_-lambda^lambda phi(x) (Phi_n(lambda - x) - Phi_n(-lambda - x)) dx
/// The outer range is truncated at lambda + 10 sigma_x + 10 sigma_n.
double survival_probability(double lambda, double sigma_x, double sigma_n);

ChannelStats channel_stats(double lambda, std::size_t l, double sigma_x, double sigma_n,
                           EntropyForm form = EntropyForm::kAsPrinted);

/// ceil(N |ln p_fp| / ln(2)^2)
std::size_t bloom_length(std::size_t n, double p_fp);

struct BloomParams {
  double lambda = 0.0;
  std::size_t l = 0;
  std::size_t l_b = 0;
  std::size_t k_hashes = 1;
  double entropy_margin_h = 3.0;
  double epsilon = 1e-3;
  std::size_t n = 0;
  double p_fp = 0.0;
  double sigma_x = 1.0;
  double sigma_n = 0.0;
  ChannelStats stats;

  /// H > ln(l_b) + h and pi0 < epsilon / N.
  bool feasible() const;
};

struct TuneOptions {
  double lambda_step = 0.005;  ///< in units of sigma_x
  double lambda_max = 5.0;     ///< in units of sigma_x
  std::size_t l_min = 8;
  std::size_t l_max = 4096;
  EntropyForm entropy = EntropyForm::kAsPrinted;
};

/// Grid search for the feasible (lambda, l) maximizing pi.
/// Throws InfeasibleConfiguration when no grid point is feasible.
BloomParams tune(std::size_t n, double p_fp, double h, double epsilon, double sigma_x,
                 double sigma_n, const TuneOptions& opts = {});

class BloomFilter {
 public:
  BloomFilter(std::size_t l_b, std::size_t k_hashes, std::uint64_t hash_seed, std::size_t code_length);

  void insert(const TernaryCode& code);
  bool contains(const TernaryCode& code) const;

  std::size_t size_bits() const { return bits_.size(); }
  std::size_t k_hashes() const { return k_; }
  std::size_t code_length() const { return code_length_; }
  std::size_t popcount() const;

  /// Bit indices addressed by `code`.
  std::vector<std::size_t> indices(const TernaryCode& code) const;

 private:
  std::vector<bool> bits_;
  std::size_t k_;
  std::uint64_t hash_seed_;
  std::size_t code_length_;
};

BloomFilter bloom_enroll(std::span<const TernaryCode> codes, const BloomParams& params,
                         std::uint64_t hash_seed);
bool bloom_query(const BloomFilter& filter, const TernaryCode& code);

void write_bloom_params_csv(std::ostream& os, const BloomParams& p);

}  // namespace gmv
