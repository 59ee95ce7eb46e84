#include <cmath>
#include <random>

#include "doctest.h"
#include "gmv/errors.hpp"
#include "gmv/normal.hpp"
#include "gmv/rng.hpp"
#include "gmv/stc_embedding.hpp"

using namespace gmv;

namespace {

// Bisection on 2 Phi(-lambda / sigma) = s, with Phi taken straight from erfc.
double lambda_by_bisection(double s, double sigma) {
  auto f = [&](double l) { return std::erfc(l / sigma / std::sqrt(2.0)) - s; };
  double lo = 0.0, hi = 40.0 * sigma;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("normal quantile matches tabulated values") {
  // Standard tables, 16 significant digits.
  struct Row { double p, z; };
  const Row table[] = {{0.5, 0.0},
                       {0.9, 1.2815515655446004},
                       {0.95, 1.6448536269514722},
                       {0.975, 1.959963984540054},
                       {0.99, 2.3263478740408408},
                       {0.999, 3.090232306167813},
                       {0.1, -1.2815515655446004},
                       {1e-6, -4.753424308822899}};
  for (const auto& r : table) {
    CHECK(normal::quantile(r.p) == doctest::Approx(r.z).epsilon(1e-12));
    if (r.z != 0.0) CHECK(normal::cdf(r.z) == doctest::Approx(r.p).epsilon(1e-12));
  }
  CHECK_THROWS_AS(normal::quantile(0.0), DomainError);
  CHECK_THROWS_AS(normal::quantile(1.0), DomainError);
}

TEST_CASE("make_transform is row-orthonormal and deterministic") {
  const TransformMatrix w = make_transform(4, 4, 0);
  const Eigen::MatrixXd gram = w.matrix() * w.matrix().transpose();
  CHECK((gram - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);

  const TransformMatrix w2 = make_transform(2, 2, 7);
  Rng rng(3);
  std::normal_distribution<double> gauss;
  for (int t = 0; t < 20; ++t) {
    Eigen::Vector2d x(gauss(rng), gauss(rng));
    CHECK(std::abs(w2.project(x).norm() - x.norm()) < 1e-10);
  }

  const TransformMatrix a = make_transform(64, 40, 99);
  const TransformMatrix b = make_transform(64, 40, 99);
  CHECK(a.matrix() == b.matrix());
  CHECK(a.rows() == 40);
  CHECK(a.cols() == 64);
  const Eigen::MatrixXd g40 = a.matrix() * a.matrix().transpose();
  CHECK((g40 - Eigen::MatrixXd::Identity(40, 40)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(make_transform(64, 40, 100).matrix() != a.matrix());

  CHECK_THROWS_AS(make_transform(3, 4, 0), InvalidShape);
  CHECK_THROWS_AS(make_transform(3, 0, 0), InvalidShape);
}

TEST_CASE("lambda_from_sparsity") {
  CHECK(lambda_from_sparsity(1.0, 1.0) == 0.0);
  CHECK(lambda_from_sparsity(0.55, 1.0) == doctest::Approx(0.5977601260424784).epsilon(1e-10));
  CHECK(lambda_from_sparsity(0.20, 1.0) == doctest::Approx(1.2815515655446004).epsilon(1e-10));
  CHECK(lambda_from_sparsity(0.3, 2.5) == doctest::Approx(lambda_by_bisection(0.3, 2.5)).epsilon(1e-10));
  CHECK_THROWS_AS(lambda_from_sparsity(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(lambda_from_sparsity(1.2, 1.0), DomainError);
}

TEST_CASE("expected_sparsity") {
  CHECK(expected_sparsity(0.0, 1.0) == 1.0);
  CHECK(expected_sparsity(0.60, 1.0) == doctest::Approx(0.5485062355001472).epsilon(1e-12));
  CHECK(expected_sparsity(1.2816, 1.0) == doctest::Approx(0.2).epsilon(1e-4));
  CHECK_THROWS_AS(expected_sparsity(0.5, 0.0), DomainError);
  CHECK_THROWS_AS(expected_sparsity(0.5, -1.0), DomainError);

  // Round trip on a grid of lambda in [0, 4].
  for (double l = 0.0; l <= 4.0; l += 0.05) {
    CHECK(lambda_from_sparsity(expected_sparsity(l, 1.0), 1.0) == doctest::Approx(l).epsilon(1e-8));
  }
  for (double s : {0.05, 0.2, 0.5, 0.85, 0.99}) {
    const EmbeddingParams p = EmbeddingParams::from_sparsity(s, 1.7);
    CHECK(std::abs(p.target_sparsity - 2.0 * normal::cdf(-p.lambda / p.sigma_x)) < 1e-9);
  }
}

TEST_CASE("embed thresholds strictly") {
  const TransformMatrix eye(Eigen::MatrixXd::Identity(3, 3), 0);
  const TernaryCode c = embed(Eigen::Vector3d(2.0, -0.5, -3.0), eye, 1.0);
  CHECK(c == TernaryCode({1, 0, -1}));
  CHECK(embed(Eigen::Vector3d(1.0, -1.0, 0.0), eye, 1.0) == TernaryCode(3));
  CHECK(embed(Eigen::Vector3d::Zero(), eye, 0.5) == TernaryCode(3));
  CHECK_THROWS_AS(embed(Eigen::Vector2d(1.0, 2.0), eye, 0.5), InvalidShape);

  const TransformMatrix w = make_transform(32, 32, 5);
  Rng rng(11);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd x(32);
  for (auto& v : x) v = gauss(rng);
  CHECK(embed(x, w, 0.0).nonzeros() == 32);  // full binary word
  for (double l : {0.0, 0.3, 1.5}) CHECK(embed(-x, w, l) == -embed(x, w, l));
}

TEST_CASE("embed_normalized is invariant to positive scaling") {
  const TransformMatrix w = make_transform(16, 16, 2);
  const EmbeddingParams p = EmbeddingParams::from_sparsity(0.5, 1.0);
  Rng rng(4);
  std::normal_distribution<double> gauss;
  for (int t = 0; t < 20; ++t) {
    Eigen::VectorXd x(16);
    for (auto& v : x) v = gauss(rng);
    const TernaryCode c = embed_normalized(x, w, p);
    CHECK(embed_normalized(x * 1e-3, w, p) == c);
    CHECK(embed_normalized(x * 1e4, w, p) == c);
    CHECK(embed_normalized(-x, w, p) == -c);
  }
  CHECK(embed_normalized(Eigen::VectorXd::Zero(16), w, p) == TernaryCode(16));
}

TEST_CASE("empirical sparsity matches expected_sparsity") {
  const std::size_t d = 64;
  const TransformMatrix w = make_transform(d, d, 8);
  Rng rng(21);
  std::normal_distribution<double> gauss(0.0, 2.0);
  Eigen::MatrixXd x(d, 2000);
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, j) = gauss(rng);
  const Eigen::MatrixXd z = w.project_columns(x);
  for (double lambda : {0.0, 0.8, 2.0, 3.5}) {
    std::size_t nz = 0;
    for (Eigen::Index j = 0; j < z.cols(); ++j) nz += quantize(z.col(j), lambda).nonzeros();
    const double frac = static_cast<double>(nz) / static_cast<double>(z.size());
    CHECK(std::abs(frac - expected_sparsity(lambda, 2.0)) < 0.01);
  }
}

TEST_CASE("TernaryCode wire format") {
  const TernaryCode c({-1, 0, 1, 1, 0});
  const auto bytes = c.serialize();
  REQUIRE(bytes.size() == 16 + 5);
  CHECK(bytes[0] == 'T');
  CHECK(bytes[1] == 'C');
  CHECK(bytes[2] == 'O');
  CHECK(bytes[3] == 'D');
  CHECK(bytes[4] == 1);
  CHECK(bytes[8] == 5);
  for (int i = 9; i < 16; ++i) CHECK(bytes[i] == 0);
  CHECK(bytes[16] == 255);
  CHECK(bytes[17] == 0);
  CHECK(bytes[18] == 1);

  // Any sequence of random codes survives a round trip through the stream format.
  Rng rng(1);
  std::uniform_int_distribution<int> sym(-1, 1), len(0, 40);
  std::vector<TernaryCode> codes;
  for (int t = 0; t < 50; ++t) {
    std::vector<std::int8_t> s(static_cast<std::size_t>(len(rng)));
    for (auto& v : s) v = static_cast<std::int8_t>(sym(rng));
    codes.emplace_back(std::move(s));
  }
  CHECK(deserialize_codes(serialize_codes(codes)) == codes);

  auto bad = bytes;
  bad[17] = 7;
  CHECK_THROWS_AS(TernaryCode::deserialize(bad), InvalidShape);
  bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS(TernaryCode::deserialize(bad), InvalidShape);
  CHECK_THROWS_AS(TernaryCode::deserialize(std::span(bytes).first(18)), InvalidShape);
  CHECK_THROWS_AS(TernaryCode({2, 0}), DomainError);
}
