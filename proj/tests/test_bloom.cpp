#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "gmv/bloom.hpp"
#include "gmv/errors.hpp"
#include "gmv/normal.hpp"
#include "gmv/rng.hpp"

using namespace gmv;

namespace {

std::vector<TernaryCode> random_codes(std::size_t count, std::size_t l, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_int_distribution<int> sym(-1, 1);
  std::vector<TernaryCode> out;
  for (std::size_t c = 0; c < count; ++c) {
    std::vector<std::int8_t> s(l);
    for (auto& v : s) v = static_cast<std::int8_t>(sym(rng));
    out.emplace_back(std::move(s));
  }
  return out;
}

std::int8_t symbol(double z, double lambda) { return z > lambda ? 1 : (z < -lambda ? -1 : 0); }

}  // namespace

TEST_CASE("adaptive_simpson") {
  CHECK(adaptive_simpson([](double x) { return x * x; }, 0.0, 3.0, 1e-12) == doctest::Approx(9.0).epsilon(1e-12));
  CHECK(adaptive_simpson([](double x) { return normal::pdf(x); }, -8.0, 8.0, 1e-12) ==
        doctest::Approx(1.0).epsilon(1e-11));
  CHECK(adaptive_simpson([](double x) { return std::exp(x); }, 1.0, 1.0, 1e-10) == 0.0);
}

TEST_CASE("channel_stats") {
  SUBCASE("noiseless channel") {
    const ChannelStats s = channel_stats(0.7, 12, 1.0, 0.0);
    CHECK(s.p_s == 1.0);
    CHECK(s.pi == 1.0);
    // Tiny noise converges to the same limit.
    CHECK(channel_stats(0.7, 12, 1.0, 1e-7).p_s == doctest::Approx(1.0).epsilon(1e-5));
  }
  SUBCASE("large lambda") {
    const ChannelStats s = channel_stats(12.0, 20, 1.0, 0.1);
    CHECK(s.pi0 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.entropy == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("p = 1/4, l = 10") {
    const double lambda = -normal::quantile(0.25);
    const ChannelStats s = channel_stats(lambda, 10, 1.0, 0.1);
    CHECK(s.p == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(s.entropy == doctest::Approx(10.0 * std::log(2.0)).epsilon(1e-12));
    CHECK(s.pi0 == doctest::Approx(std::pow(0.5, 10)).epsilon(1e-12));
    CHECK(s.pi == doctest::Approx(std::pow(s.p_s, 10)).epsilon(1e-12));
    const ChannelStats t = channel_stats(lambda, 10, 1.0, 0.1, EntropyForm::kTernary);
    CHECK(t.entropy == doctest::Approx(10.0 * (-0.5 * std::log(0.25) - 0.5 * std::log(0.5))).epsilon(1e-12));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(channel_stats(0.5, 0, 1.0, 0.1), DomainError);
    CHECK_THROWS_AS(channel_stats(0.5, 4, 0.0, 0.1), DomainError);
    CHECK_THROWS_AS(channel_stats(0.5, 4, 1.0, -0.1), DomainError);
  }
}

TEST_CASE("survival probability matches simulation") {
  Rng rng(17);
  std::normal_distribution<double> gauss;
  const int draws = 400000;
  for (double lambda : {0.0, 0.6, 1.5}) {
    for (double sigma_n : {0.1, 0.5}) {
      int same = 0;
      for (int i = 0; i < draws; ++i) {
        const double x = gauss(rng);
        const double y = x + sigma_n * gauss(rng);
        same += symbol(x, lambda) == symbol(y, lambda);
      }
      const double mc = static_cast<double>(same) / draws;
      CHECK(std::abs(mc - survival_probability(lambda, 1.0, sigma_n)) < 0.003);
    }
  }
}

TEST_CASE("bloom_length") {
  CHECK(bloom_length(128, 0.01) == 1227);
  CHECK(bloom_length(1, 0.5) == 2);
  CHECK(bloom_length(10, 0.1) == 48);
  CHECK_THROWS_AS(bloom_length(10, 0.0), DomainError);
  CHECK_THROWS_AS(bloom_length(10, 1.0), DomainError);
}

TEST_CASE("tune") {
  const BloomParams p = tune(128, 0.01, 3.0, 1e-3, 1.0, 0.1);
  CHECK(p.feasible());
  CHECK(p.l_b == 1227);
  CHECK(p.k_hashes == 7);
  CHECK(p.entropy_margin_h == 3.0);
  CHECK(p.epsilon == 1e-3);
  CHECK(p.stats.entropy > std::log(1227.0) + 3.0);
  CHECK(p.stats.pi0 < 1e-3 / 128.0);

  // Exhaustive re-check on a coarse sub-grid: no feasible point beats it.
  const double floor_h = std::log(1227.0) + 3.0;
  for (double lambda = 0.0; lambda <= 5.0; lambda += 0.25) {
    for (std::size_t l = 8; l <= 4096; l = l < 64 ? l + 1 : l * 2) {
      const ChannelStats s = channel_stats(lambda, l, 1.0, 0.1);
      if (s.entropy > floor_h && s.pi0 < 1e-3 / 128.0) CHECK(s.pi <= p.stats.pi * (1.0 + 1e-12));
    }
  }
  CHECK_THROWS_AS(tune(128, 0.01, 3.0, 1e-3, 1.0, 0.1, {0.005, 5.0, 8, 9, EntropyForm::kAsPrinted}),
                  InfeasibleConfiguration);
}

TEST_CASE("Bloom filter membership") {
  BloomParams params;
  params.l = 24;
  params.n = 200;
  params.l_b = bloom_length(params.n, 0.01);
  params.k_hashes = 7;
  const auto members = random_codes(params.n, params.l, 1);
  const BloomFilter filter = bloom_enroll(members, params, 42);
  for (const auto& c : members) CHECK(bloom_query(filter, c));
  CHECK(filter.popcount() <= params.n * params.k_hashes);

  const BloomFilter empty = bloom_enroll({}, params, 42);
  CHECK(empty.popcount() == 0);
  for (const auto& c : random_codes(50, params.l, 2)) CHECK_FALSE(bloom_query(empty, c));

  // False-positive rate on codes that were not enrolled.
  const std::set<std::vector<std::int8_t>> enrolled = [&] {
    std::set<std::vector<std::int8_t>> s;
    for (const auto& c : members) s.emplace(c.symbols().begin(), c.symbols().end());
    return s;
  }();
  int fp = 0, total = 0;
  for (const auto& c : random_codes(10000, params.l, 3)) {
    if (enrolled.count({c.symbols().begin(), c.symbols().end()})) continue;
    ++total;
    fp += bloom_query(filter, c);
  }
  const double rate = static_cast<double>(fp) / total;
  CHECK(rate < 0.02);
  CHECK(rate > 0.005);

  // Different seeds address different bits.
  const BloomFilter other = bloom_enroll(members, params, 43);
  CHECK(other.indices(members[0]) != filter.indices(members[0]));

  CHECK_THROWS_AS(bloom_query(filter, TernaryCode(params.l + 1)), InvalidShape);
  BloomFilter growing(64, 3, 1, 5);
  std::size_t last = 0;
  for (const auto& c : random_codes(30, 5, 9)) {
    growing.insert(c);
    CHECK(growing.popcount() >= last);
    last = growing.popcount();
  }
}

TEST_CASE("BloomParams CSV") {
  const BloomParams p = tune(128, 0.01, 3.0, 1e-3, 1.0, 0.1);
  std::ostringstream os;
  write_bloom_params_csv(os, p);
  CHECK(os.str().rfind("lambda,l,l_b,k,H,pi0,pi\n", 0) == 0);
}
