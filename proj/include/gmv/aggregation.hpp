#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "gmv/stc_embedding.hpp"

namespace gmv {

/// d x N matrix whose columns are enrolled signatures. Never empty and
/// never holds a non-finite entry.
class SignatureSet {
 public:
  /// Throws EmptyGroup for zero columns, DomainError for NaN/Inf entries.
  explicit SignatureSet(Eigen::MatrixXd g);

  std::size_t dim() const { return static_cast<std::size_t>(g_.rows()); }
  std::size_t count() const { return static_cast<std::size_t>(g_.cols()); }
  const Eigen::MatrixXd& matrix() const { return g_; }
  auto column(std::size_t j) const { return g_.col(static_cast<Eigen::Index>(j)); }

  /// Column mean m.
  Eigen::VectorXd mean() const;
  /// Columns at `indices`, in that order.
  SignatureSet select(std::span<const std::size_t> indices) const;
  /// Every column divided by its Euclidean norm (zero columns kept as is).
  SignatureSet normalized() const;

 private:
  Eigen::MatrixXd g_;
};

enum class AggregationScheme {
  HoaSum,       ///< h(G 1)
  HoaPinv,      ///< h((G^+)^T 1)
  AohSignSum,   ///< sign(sum_j h(x_j))
  AohMajority,  ///< per-symbol mode of h(x_j)
};

inline constexpr AggregationScheme kAllSchemes[] = {
    AggregationScheme::HoaSum, AggregationScheme::HoaPinv, AggregationScheme::AohSignSum,
    AggregationScheme::AohMajority};

std::string_view to_string(AggregationScheme scheme);
/// Accepts hoa-sum, hoa-pinv, aoh-signsum, aoh-majority and the numbered
/// aliases hoa-2, hoa-3, aoh-4, aoh-5 (case-insensitive).
AggregationScheme parse_scheme(std::string_view name);

bool is_hash_of_aggregate(AggregationScheme scheme);

Eigen::VectorXd agg_sum(const SignatureSet& g);

struct PinvAggregate {
  Eigen::VectorXd f;
  std::size_t rank = 0;
  /// rank < N: f is the minimum-norm least-squares solution and the
  /// constraints x_i^T f = 1 hold only approximately.
  bool rank_deficient = false;
};

/// f = (G^+)^T 1_N through a thin SVD; singular values below
/// max(d, N) * sigma_1 * 1e-12 are treated as zero.
PinvAggregate agg_pinv(const SignatureSet& g);

/// Per-symbol sign of the integer sum, with sign(0) = 0.
TernaryCode agg_sign_sum(std::span<const TernaryCode> codes);
/// Per-symbol mode over {-1, 0, +1}; any tie for the most frequent value gives 0.
TernaryCode agg_majority(std::span<const TernaryCode> codes);

struct Representative {
  TernaryCode code;
  bool rank_deficient = false;
};

/// Group representative under `scheme`. Every embedding uses
/// embed_normalized, so HoA schemes threshold the aggregate relative to its
/// own scale. `normalize` rescales each signature to unit norm first.
Representative group_representative(AggregationScheme scheme, const SignatureSet& g,
                                     const TransformMatrix& w, const EmbeddingParams& params,
                                     bool normalize = false);

/// Same as above for the AoH schemes when the member codes already exist.
TernaryCode aggregate_codes(AggregationScheme scheme, std::span<const TernaryCode> codes);

}  // namespace gmv
