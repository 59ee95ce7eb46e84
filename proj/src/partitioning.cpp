#include "gmv/partitioning.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <string>

#include "gmv/errors.hpp"
#include "gmv/rng.hpp"

namespace gmv {

GroupAssignment GroupAssignment::from_labels(std::vector<std::size_t> labels, std::size_t groups) {
  GroupAssignment a;
  a.sizes.assign(groups, 0);
  for (std::size_t l : labels) {
    if (l >= groups) throw DomainError("GroupAssignment: label out of range");
    ++a.sizes[l];
  }
  a.labels = std::move(labels);
  a.n_min = groups == 0 ? 0 : *std::min_element(a.sizes.begin(), a.sizes.end());
  return a;
}

std::vector<std::vector<std::size_t>> GroupAssignment::members() const {
  std::vector<std::vector<std::size_t>> out(groups());
  for (std::size_t k = 0; k < groups(); ++k) out[k].reserve(sizes[k]);
  for (std::size_t i = 0; i < labels.size(); ++i) out[labels[i]].push_back(i);
  return out;
}

namespace {

void check_group_count(std::size_t n, std::size_t m) {
  if (m == 0 || m > n) {
    throw DomainError("partition: need 1 <= M <= N (M=" + std::to_string(m) +
                      ", N=" + std::to_string(n) + ")");
  }
}

}  // namespace

GroupAssignment random_partition(std::size_t n, std::size_t m, std::uint64_t seed) {
  check_group_count(n, m);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::size_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[perm[i]] = i * m / n;
  return GroupAssignment::from_labels(std::move(labels), m);
}

namespace {

double objective(const Eigen::MatrixXd& x, const Eigen::MatrixXd& c,
                 const std::vector<std::size_t>& labels) {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    acc += (x.col(j) - c.col(static_cast<Eigen::Index>(labels[j]))).squaredNorm();
  }
  return acc;
}

Eigen::MatrixXd plus_plus_seeding(const Eigen::MatrixXd& x, std::size_t m, Rng& rng) {
  const Eigen::Index n = x.cols();
  Eigen::MatrixXd c(x.rows(), static_cast<Eigen::Index>(m));
  std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
  c.col(0) = x.col(first(rng));
  Eigen::VectorXd d2(n);
  for (Eigen::Index j = 0; j < n; ++j) d2[j] = (x.col(j) - c.col(0)).squaredNorm();
  for (std::size_t k = 1; k < m; ++k) {
    const double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double target = u(rng);
      pick = n - 1;
      for (Eigen::Index j = 0; j < n; ++j) {
        target -= d2[j];
        if (target < 0.0 && d2[j] > 0.0) {
          pick = j;
          break;
        }
      }
    } else {
      pick = first(rng);
    }
    c.col(static_cast<Eigen::Index>(k)) = x.col(pick);
    for (Eigen::Index j = 0; j < n; ++j) {
      d2[j] = std::min(d2[j], (x.col(j) - x.col(pick)).squaredNorm());
    }
  }
  return c;
}

void update_centroids(const Eigen::MatrixXd& x, const std::vector<std::size_t>& labels,
                      Eigen::MatrixXd& c, std::vector<std::size_t>& sizes, bool unit) {
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(c.rows(), c.cols());
  std::fill(sizes.begin(), sizes.end(), 0);
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    sum.col(static_cast<Eigen::Index>(labels[j])) += x.col(j);
    ++sizes[labels[j]];
  }
  for (Eigen::Index k = 0; k < c.cols(); ++k) {
    if (sizes[k] == 0) continue;
    c.col(k) = sum.col(k) / static_cast<double>(sizes[k]);
    if (unit && c.col(k).norm() > 0.0) c.col(k).normalize();
  }
}

// Moves, for every empty cluster, the point farthest from its centroid
// (taken from a cluster with at least two members) into the empty cluster.
bool repair_empty(const Eigen::MatrixXd& x, std::vector<std::size_t>& labels, Eigen::MatrixXd& c,
                  std::vector<std::size_t>& sizes, bool unit) {
  bool repaired = false;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    if (sizes[k] != 0) continue;
    Eigen::Index far = -1;
    double best = -1.0;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      if (sizes[labels[j]] < 2) continue;
      const double d = (x.col(j) - c.col(static_cast<Eigen::Index>(labels[j]))).squaredNorm();
      if (d > best) {
        best = d;
        far = j;
      }
    }
    --sizes[labels[far]];
    labels[far] = k;
    sizes[k] = 1;
    c.col(static_cast<Eigen::Index>(k)) = x.col(far);
    repaired = true;
  }
  if (repaired) update_centroids(x, labels, c, sizes, unit);
  return repaired;
}

}  // namespace

KmeansResult kmeans(const SignatureSet& g, std::size_t m, std::uint64_t seed, std::size_t max_iters,
                    KmeansMetric metric) {
  check_group_count(g.count(), m);
  if (max_iters == 0) throw DomainError("kmeans: max_iters must be >= 1");
  const bool unit = metric == KmeansMetric::kCosine;
  const Eigen::MatrixXd x = unit ? g.normalized().matrix() : g.matrix();
  const Eigen::Index n = x.cols();
  Rng rng(seed);

  KmeansResult res;
  Eigen::MatrixXd c = plus_plus_seeding(x, m, rng);
  std::vector<std::size_t> labels(static_cast<std::size_t>(n), std::numeric_limits<std::size_t>::max());
  std::vector<std::size_t> sizes(m, 0);
  const Eigen::VectorXd x_sq = x.colwise().squaredNorm().transpose();

  for (std::size_t it = 0; it < max_iters; ++it) {
    // ||x - c||^2 = ||x||^2 - 2 x.c + ||c||^2; only the last two terms
    // affect the argmin.
    const Eigen::MatrixXd cross = x.transpose() * c;  // n x m
    const Eigen::RowVectorXd c_sq = c.colwise().squaredNorm();
    std::size_t changed = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const std::size_t current = labels[j];
      std::size_t best_k = current;
      double best = current < m ? c_sq[static_cast<Eigen::Index>(current)] -
                                      2.0 * cross(j, static_cast<Eigen::Index>(current))
                                : std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < m; ++k) {
        const double v = c_sq[static_cast<Eigen::Index>(k)] - 2.0 * cross(j, static_cast<Eigen::Index>(k));
        // The relative slack keeps round-off from bouncing a point between
        // two equidistant centroids.
        if (v < best - 1e-12 * (x_sq[j] + std::abs(v))) {
          best = v;
          best_k = k;
        }
      }
      if (best_k != current) {
        labels[j] = best_k;
        ++changed;
      }
    }
    update_centroids(x, labels, c, sizes, unit);
    const bool repaired = repair_empty(x, labels, c, sizes, unit);
    res.objective.push_back(objective(x, c, labels));
    res.iterations = it + 1;
    if (changed == 0 && !repaired) {
      res.converged = true;
      break;
    }
  }
  res.assignment = GroupAssignment::from_labels(std::move(labels), m);
  res.centroids = std::move(c);
  return res;
}

GroupAssignment kmeans_partition(const SignatureSet& g, std::size_t m, std::uint64_t seed,
                                 std::size_t max_iters, KmeansMetric metric) {
  return kmeans(g, m, seed, max_iters, metric).assignment;
}

std::string_view to_string(KmeansMetric metric) {
  return metric == KmeansMetric::kCosine ? "cosine" : "euclidean";
}

KmeansMetric parse_kmeans_metric(std::string_view name) {
  if (name == "euclidean") return KmeansMetric::kEuclidean;
  if (name == "cosine") return KmeansMetric::kCosine;
  throw DomainError("unknown k-means metric: " + std::string(name));
}

void write_assignment_csv(std::ostream& os, const GroupAssignment& a) {
  os << "index,group_id\n";
  for (std::size_t i = 0; i < a.labels.size(); ++i) os << i << ',' << a.labels[i] << '\n';
}

}  // namespace gmv
