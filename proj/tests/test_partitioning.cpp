#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "gmv/errors.hpp"
#include "gmv/partitioning.hpp"
#include "gmv/rng.hpp"

using namespace gmv;

namespace {

SignatureSet gaussian(std::size_t d, std::size_t n, std::uint64_t seed, double sigma = 1.0) {
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, sigma);
  Eigen::MatrixXd m(d, n);
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = gauss(rng);
  return SignatureSet(m);
}

}  // namespace

TEST_CASE("random_partition") {
  const GroupAssignment a = random_partition(8, 4, 1);
  CHECK(a.sizes == std::vector<std::size_t>{2, 2, 2, 2});
  CHECK(a.n_min == 2);

  const GroupAssignment one = random_partition(10, 1, 3);
  CHECK(one.sizes == std::vector<std::size_t>{10});
  CHECK(std::all_of(one.labels.begin(), one.labels.end(), [](std::size_t l) { return l == 0; }));

  CHECK(random_partition(100, 7, 9).labels == random_partition(100, 7, 9).labels);
  CHECK(random_partition(100, 7, 9).labels != random_partition(100, 7, 10).labels);

  for (std::size_t n : {1, 5, 17, 100, 257}) {
    for (std::size_t m = 1; m <= std::min<std::size_t>(n, 13); ++m) {
      const GroupAssignment r = random_partition(n, m, n * 31 + m);
      const auto [lo, hi] = std::minmax_element(r.sizes.begin(), r.sizes.end());
      CHECK(*hi - *lo <= 1);
      std::size_t total = 0;
      for (std::size_t s : r.sizes) total += s;
      CHECK(total == n);
      CHECK(r.n_min == *lo);
    }
  }
  CHECK_THROWS_AS(random_partition(3, 4, 0), DomainError);
  CHECK_THROWS_AS(random_partition(3, 0, 0), DomainError);
}

TEST_CASE("kmeans single cluster") {
  const SignatureSet g = gaussian(5, 30, 2);
  const KmeansResult r = kmeans(g, 1, 0);
  CHECK(std::all_of(r.assignment.labels.begin(), r.assignment.labels.end(), [](std::size_t l) { return l == 0; }));
  CHECK((r.centroids.col(0) - g.mean()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("kmeans recovers separated blobs") {
  const std::size_t d = 10, per_blob = 50;
  Eigen::MatrixXd x = gaussian(d, 2 * per_blob, 7).matrix();
  Eigen::VectorXd offset = Eigen::VectorXd::Zero(d);
  offset[0] = 20.0;  // 20 sigma apart
  for (std::size_t j = per_blob; j < 2 * per_blob; ++j) x.col(static_cast<Eigen::Index>(j)) += offset;
  const SignatureSet g(x);
  const KmeansResult r = kmeans(g, 2, 3);
  CHECK(r.converged);
  const std::size_t first = r.assignment.labels[0];
  for (std::size_t j = 0; j < 2 * per_blob; ++j) {
    CHECK(r.assignment.labels[j] == (j < per_blob ? first : 1 - first));
  }
  // Every point sits at its nearest centroid.
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    Eigen::Index nearest = 0;
    (r.centroids.colwise() - x.col(j)).colwise().squaredNorm().minCoeff(&nearest);
    CHECK(static_cast<std::size_t>(nearest) == r.assignment.labels[static_cast<std::size_t>(j)]);
  }
}

TEST_CASE("kmeans repairs empty clusters") {
  Eigen::MatrixXd x(3, 4);
  for (int j = 0; j < 4; ++j) x.col(j) = Eigen::Vector3d(1.0, 2.0, 3.0);
  const KmeansResult r = kmeans(SignatureSet(x), 2, 5);
  CHECK(r.assignment.sizes[0] > 0);
  CHECK(r.assignment.sizes[1] > 0);
  CHECK(r.assignment.n_min >= 1);
}

TEST_CASE("kmeans objective is non-increasing and runs are deterministic") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const SignatureSet g = gaussian(16, 300, 40 + seed);
    const KmeansResult r = kmeans(g, 8, seed);
    for (std::size_t i = 1; i < r.objective.size(); ++i) {
      CHECK(r.objective[i] <= r.objective[i - 1] * (1.0 + 1e-12));
    }
    CHECK(r.assignment.sizes.size() == 8);
    CHECK(r.assignment.n_min >= 1);
    CHECK(kmeans(g, 8, seed).assignment.labels == r.assignment.labels);
  }
  CHECK_THROWS_AS(kmeans(gaussian(2, 3, 1), 4, 0), DomainError);
}

TEST_CASE("cosine kmeans") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const SignatureSet g = gaussian(16, 300, 60 + seed);
    const KmeansResult r = kmeans(g, 8, seed, 100, KmeansMetric::kCosine);
    for (std::size_t i = 1; i < r.objective.size(); ++i) {
      CHECK(r.objective[i] <= r.objective[i - 1] * (1.0 + 1e-12));
    }
    for (Eigen::Index k = 0; k < r.centroids.cols(); ++k) CHECK(r.centroids.col(k).norm() == doctest::Approx(1.0));
    CHECK(r.assignment.n_min >= 1);
    // Labels only depend on directions.
    Eigen::MatrixXd scaled = g.matrix();
    for (Eigen::Index j = 0; j < scaled.cols(); ++j) scaled.col(j) *= 1.0 + static_cast<double>(j % 7);
    CHECK(kmeans(SignatureSet(scaled), 8, seed, 100, KmeansMetric::kCosine).assignment.labels ==
          r.assignment.labels);
  }
  // Two blobs along opposite directions with very different norms.
  Eigen::MatrixXd x(2, 6);
  x << 1, 5, 50, -1, -5, -50,
       0.1, 0.4, 6, -0.1, -0.4, -6;
  const GroupAssignment a = kmeans_partition(SignatureSet(x), 2, 3, 100, KmeansMetric::kCosine);
  CHECK(a.labels[0] == a.labels[1]);
  CHECK(a.labels[0] == a.labels[2]);
  CHECK(a.labels[3] == a.labels[4]);
  CHECK(a.labels[3] == a.labels[5]);
  CHECK(a.labels[0] != a.labels[3]);

  CHECK(parse_kmeans_metric("cosine") == KmeansMetric::kCosine);
  CHECK(to_string(KmeansMetric::kEuclidean) == "euclidean");
  CHECK_THROWS_AS(parse_kmeans_metric("manhattan"), DomainError);
}

TEST_CASE("assignment CSV") {
  const GroupAssignment a = GroupAssignment::from_labels({1, 0, 1}, 2);
  std::ostringstream os;
  write_assignment_csv(os, a);
  CHECK(os.str() == "index,group_id\n0,1\n1,0\n2,1\n");
  CHECK(a.members()[1] == std::vector<std::size_t>{0, 2});
  CHECK_THROWS_AS(GroupAssignment::from_labels({0, 3}, 2), DomainError);
}
