#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "gmv/aggregation.hpp"

namespace gmv {

struct GroupAssignment {
  std::vector<std::size_t> labels;  ///< group id of each signature, in [0, M)
  std::vector<std::size_t> sizes;   ///< n_k
  std::size_t n_min = 0;

  /// Builds sizes and n_min from labels. Throws DomainError on a label >= groups.
  static GroupAssignment from_labels(std::vector<std::size_t> labels, std::size_t groups);

  std::size_t groups() const { return sizes.size(); }
  std::vector<std::vector<std::size_t>> members() const;
};

/// Seeded uniform permutation cut into M contiguous chunks whose sizes
/// differ by at most one. Throws DomainError unless 1 <= M <= N.
GroupAssignment random_partition(std::size_t n, std::size_t m, std::uint64_t seed);

struct KmeansResult {
  GroupAssignment assignment;
  Eigen::MatrixXd centroids;      ///< d x M
  std::vector<double> objective;  ///< sum of squared distances after each iteration
                                  ///< (on unit-norm signatures for the cosine metric)
  std::size_t iterations = 0;
  bool converged = false;
};

inline constexpr std::size_t kDefaultKmeansIters = 100;

/// kEuclidean clusters the raw signatures. kCosine (spherical k-means)
/// clusters the unit-norm signatures with unit-norm centroids, so that
/// assignment depends on direction only.
enum class KmeansMetric { kEuclidean, kCosine };

std::string_view to_string(KmeansMetric metric);
KmeansMetric parse_kmeans_metric(std::string_view name);

/// Lloyd iterations from a k-means++ seeding. Stops when no label changes
/// or after max_iters. A cluster that empties is re-seeded with the point
/// farthest from its own centroid, which moves to the empty cluster.
KmeansResult kmeans(const SignatureSet& g, std::size_t m, std::uint64_t seed,
                    std::size_t max_iters = kDefaultKmeansIters,
                    KmeansMetric metric = KmeansMetric::kEuclidean);

GroupAssignment kmeans_partition(const SignatureSet& g, std::size_t m, std::uint64_t seed,
                                 std::size_t max_iters = kDefaultKmeansIters,
                                 KmeansMetric metric = KmeansMetric::kEuclidean);

/// CSV with columns index, group_id.
void write_assignment_csv(std::ostream& os, const GroupAssignment& a);

}  // namespace gmv
