#include "gmv/bloom.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <string>

#include <fmt/format.h>
#include <sodium.h>

#include "gmv/errors.hpp"
#include "gmv/normal.hpp"

namespace gmv {

namespace {

double simpson_step(const std::function<double(double)>& f, double a, double b, double fa,
                    double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth) {
  if (b <= a) return 0.0;
  // Start from four panels so narrow features near the ends are not missed
  // by the first coarse estimate.
  constexpr int kPanels = 4;
  const double h = (b - a) / kPanels;
  double total = 0.0;
  for (int i = 0; i < kPanels; ++i) {
    const double lo = a + i * h;
    const double hi = i + 1 == kPanels ? b : lo + h;
    const double flo = f(lo);
    const double fhi = f(hi);
    const double fm = f(0.5 * (lo + hi));
    const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fm + fhi);
    total += simpson_step(f, lo, hi, flo, fm, fhi, whole, tol / kPanels, max_depth);
  }
  return total;
}

double survival_probability(double lambda, double sigma_x, double sigma_n) {
  if (!(sigma_x > 0.0)) throw DomainError("survival_probability: sigma_x must be > 0");
  if (!(sigma_n >= 0.0)) throw DomainError("survival_probability: sigma_n must be >= 0");
  if (!(lambda >= 0.0)) throw DomainError("survival_probability: lambda must be >= 0");
  if (sigma_n == 0.0) return 1.0;

  constexpr double kTol = 1e-10;
  const double upper = lambda + 10.0 * sigma_x + 10.0 * sigma_n;
  const double tails = 2.0 * adaptive_simpson(
                                 [&](double x) {
                                   return normal::pdf(x, sigma_x) *
                                          normal::cdf(x - lambda, sigma_n);  // 1 - Phi_n(lambda - x)
                                 },
                                 lambda, upper, kTol);
  const double middle = adaptive_simpson(
      [&](double x) {
        return normal::pdf(x, sigma_x) *
               (normal::cdf(lambda - x, sigma_n) - normal::cdf(-lambda - x, sigma_n));
      },
      -lambda, lambda, kTol);
  return std::min(1.0, tails + middle);
}

ChannelStats channel_stats(double lambda, std::size_t l, double sigma_x, double sigma_n,
                           EntropyForm form) {
  if (l == 0) throw DomainError("channel_stats: l must be >= 1");
  if (!(sigma_x > 0.0) || !(sigma_n >= 0.0)) throw DomainError("channel_stats: invalid sigma");
  ChannelStats s;
  s.p = normal::cdf(-lambda / sigma_x);
  const double zero = 1.0 - 2.0 * s.p;
  const double per_symbol = form == EntropyForm::kAsPrinted
                                ? -xlogx(2.0 * s.p) - xlogx(zero)
                                : -2.0 * xlogx(s.p) - xlogx(zero);
  const double ld = static_cast<double>(l);
  s.entropy = ld * per_symbol;
  s.pi0 = std::pow(zero, ld);
  s.p_s = survival_probability(lambda, sigma_x, sigma_n);
  s.pi = std::pow(s.p_s, ld);
  return s;
}

std::size_t bloom_length(std::size_t n, double p_fp) {
  if (!(p_fp > 0.0 && p_fp < 1.0)) throw DomainError("bloom_length: p_fp must lie in (0, 1)");
  if (n == 0) throw DomainError("bloom_length: N must be >= 1");
  const double ln2 = std::log(2.0);
  return static_cast<std::size_t>(
      std::ceil(static_cast<double>(n) * std::abs(std::log(p_fp)) / (ln2 * ln2)));
}

bool BloomParams::feasible() const {
  return stats.entropy > std::log(static_cast<double>(l_b)) + entropy_margin_h &&
         stats.pi0 < epsilon / static_cast<double>(n);
}

BloomParams tune(std::size_t n, double p_fp, double h, double epsilon, double sigma_x,
                 double sigma_n, const TuneOptions& opts) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("tune: epsilon must lie in (0, 1)");
  if (!(h >= 0.0)) throw DomainError("tune: entropy margin must be >= 0");
  if (!(sigma_x > 0.0) || !(sigma_n >= 0.0)) throw DomainError("tune: invalid sigma");
  if (opts.l_min == 0 || opts.l_min > opts.l_max) throw DomainError("tune: bad code length range");

  BloomParams best;
  best.l_b = bloom_length(n, p_fp);
  best.entropy_margin_h = h;
  best.epsilon = epsilon;
  best.n = n;
  best.p_fp = p_fp;
  best.sigma_x = sigma_x;
  best.sigma_n = sigma_n;
  best.k_hashes = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::lround(static_cast<double>(best.l_b) /
                                              static_cast<double>(n) * std::log(2.0))));
  const double entropy_floor = std::log(static_cast<double>(best.l_b)) + h;
  const double pi0_ceiling = epsilon / static_cast<double>(n);

  bool found = false;
  double best_log_pi = -INFINITY;
  const auto steps = static_cast<long>(std::lround(opts.lambda_max / opts.lambda_step));
  for (long i = 0; i <= steps; ++i) {
    const double lambda = static_cast<double>(i) * opts.lambda_step * sigma_x;
    const ChannelStats unit = channel_stats(lambda, 1, sigma_x, sigma_n, opts.entropy);
    if (unit.p_s <= 0.0) continue;
    // H grows and pi0, pi shrink with l, so the shortest feasible l is the
    // best one for this lambda.
    for (std::size_t l = opts.l_min; l <= opts.l_max; ++l) {
      const double ld = static_cast<double>(l);
      if (ld * unit.entropy > entropy_floor && std::pow(unit.pi0, ld) < pi0_ceiling) {
        const double log_pi = ld * std::log(unit.p_s);
        if (!found || log_pi > best_log_pi) {
          found = true;
          best_log_pi = log_pi;
          best.lambda = lambda;
          best.l = l;
        }
        break;
      }
    }
  }
  if (!found) {
    throw InfeasibleConfiguration(fmt::format(
        "tune: no (lambda, l) with H > {:.4g} nats and pi0 < {:.4g}", entropy_floor, pi0_ceiling));
  }
  best.stats = channel_stats(best.lambda, best.l, sigma_x, sigma_n, opts.entropy);
  return best;
}

BloomFilter::BloomFilter(std::size_t l_b, std::size_t k_hashes, std::uint64_t hash_seed,
                         std::size_t code_length)
    : bits_(l_b, false), k_(k_hashes), hash_seed_(hash_seed), code_length_(code_length) {
  if (l_b == 0 || k_hashes == 0) throw DomainError("BloomFilter: l_b and k must be >= 1");
  if (sodium_init() < 0) throw Error("BloomFilter: libsodium initialisation failed");
}

std::vector<std::size_t> BloomFilter::indices(const TernaryCode& code) const {
  if (code.size() != code_length_) {
    throw InvalidShape("BloomFilter: code length " + std::to_string(code.size()) +
                       " differs from enrolled length " + std::to_string(code_length_));
  }
  const std::vector<std::uint8_t> msg = code.serialize();
  std::vector<std::size_t> out(k_);
  for (std::size_t i = 0; i < k_; ++i) {
    // SipHash-2-4 keyed by (seed, function index).
    std::array<unsigned char, crypto_shorthash_KEYBYTES> key{};
    for (int b = 0; b < 8; ++b) {
      key[b] = static_cast<unsigned char>(hash_seed_ >> (8 * b));
      key[8 + b] = static_cast<unsigned char>(static_cast<std::uint64_t>(i) >> (8 * b));
    }
    std::array<unsigned char, crypto_shorthash_BYTES> digest{};
    crypto_shorthash(digest.data(), msg.data(), msg.size(), key.data());
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v |= std::uint64_t{digest[b]} << (8 * b);
    out[i] = static_cast<std::size_t>(v % bits_.size());
  }
  return out;
}

void BloomFilter::insert(const TernaryCode& code) {
  for (std::size_t idx : indices(code)) bits_[idx] = true;
}

bool BloomFilter::contains(const TernaryCode& code) const {
  for (std::size_t idx : indices(code)) {
    if (!bits_[idx]) return false;
  }
  return true;
}

std::size_t BloomFilter::popcount() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), true));
}

BloomFilter bloom_enroll(std::span<const TernaryCode> codes, const BloomParams& params,
                         std::uint64_t hash_seed) {
  BloomFilter filter(params.l_b, params.k_hashes, hash_seed, params.l);
  for (const auto& c : codes) filter.insert(c);
  return filter;
}

bool bloom_query(const BloomFilter& filter, const TernaryCode& code) { return filter.contains(code); }

void write_bloom_params_csv(std::ostream& os, const BloomParams& p) {
  os << "lambda,l,l_b,k,H,pi0,pi\n";
  os << fmt::format("{:.9g},{},{},{},{:.9g},{:.9g},{:.9g}\n", p.lambda, p.l, p.l_b, p.k_hashes,
                    p.stats.entropy, p.stats.pi0, p.stats.pi);
}

}  // namespace gmv
