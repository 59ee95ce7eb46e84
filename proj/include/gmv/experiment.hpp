#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "gmv/aggregation.hpp"
#include "gmv/partitioning.hpp"

namespace gmv {

/// N i.i.d. N(0, sigma_x^2 I_d) columns, deterministic in seed.
SignatureSet gen_signatures(std::size_t n, std::size_t d, double sigma_x, std::uint64_t seed);

/// x + N(0, sigma_n^2 I) noise, deterministic in seed.
Eigen::VectorXd gen_query(const Eigen::Ref<const Eigen::VectorXd>& x, double sigma_n,
                          std::uint64_t seed);

enum class Partitioner { kRandom, kKmeans };

std::string_view to_string(Partitioner p);
Partitioner parse_partitioner(std::string_view name);

struct ExperimentConfig {
  std::uint64_t seed = 1;
  std::size_t d = 1024;
  std::size_t n = 128;
  std::size_t m = 1;
  double sigma_x = 1.0;
  double sigma_n = 0.1;
  std::vector<double> sparsity_grid{0.6};
  std::vector<AggregationScheme> schemes{std::begin(kAllSchemes), std::end(kAllSchemes)};
  Partitioner partitioner = Partitioner::kRandom;
  std::size_t trials_pos = 2000;
  std::size_t trials_neg = 2000;
  bool normalize_signatures = false;
  bool bloom_baseline = false;
  std::size_t kmeans_iters = 100;
  KmeansMetric kmeans_metric = KmeansMetric::kCosine;

  /// Throws DomainError on an inconsistent configuration.
  void validate() const;
  /// Sets one field from its textual form; throws DomainError on an unknown key.
  void set(std::string_view key, std::string_view value);
  /// N and trial counts multiplied by `factor` (at least 1; M capped at N).
  ExperimentConfig scaled(double factor) const;

  /// Line-oriented `key = value` text; `#` starts a comment. Missing keys
  /// keep their defaults.
  static ExperimentConfig parse(std::string_view text);
  std::string to_text() const;
};

struct ResultRow {
  std::string scheme;
  std::string partitioner;
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t d = 0;
  double sigma_x = 0.0;
  double sigma_n = 0.0;
  double sparsity = 0.0;
  double lambda = 0.0;
  std::size_t n_min = 0;
  double auc = 0.0;
  double auc_theory = 0.0;
  double ptp_at_pfp = 0.0;  ///< true-positive rate at p_fp = 1e-2
  double pfp_observed = 0.0;
  double mse_embedding = 0.0;
  double mse_embedding_norm = 0.0;  ///< mse_embedding / sigma_x^2
  double mse_enrolled_empirical = 0.0;
  double mse_enrolled_theory = 0.0;
  double lower_bound = 0.0;
  bool rank_deficient = false;
  std::string status = "ok";
};

/// One row per (scheme, sparsity) plus an optional Bloom row. All schemes
/// and sparsities share the same signatures, transform, partition and
/// queries; every query is drawn from its own substream of config.seed.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config);

void write_results_csv(std::ostream& os, const std::vector<ResultRow>& rows);

/// Names accepted by preset_configs.
std::vector<std::string> preset_names();
/// Configurations behind a named preset, scaled by `scale`, with `seed`.
std::vector<ExperimentConfig> preset_configs(std::string_view name, double scale,
                                             std::uint64_t seed);

}  // namespace gmv
