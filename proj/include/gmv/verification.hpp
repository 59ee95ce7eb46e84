#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "gmv/stc_embedding.hpp"

namespace gmv {

/// c(q, r) = -||q - r||. Zero iff the codes are identical.
double score(const TernaryCode& q, const TernaryCode& r);
/// Squared distance ||q - r||^2 as an integer.
long squared_distance(const TernaryCode& q, const TernaryCode& r);

/// Accept iff s > tau.
constexpr bool decide(double s, double tau) { return s > tau; }

struct OperatingPoint {
  double tau = 0.0;
  double p_fp = 0.0;
  double p_fn = 0.0;
};

struct RocCurve {
  std::vector<OperatingPoint> points;  ///< ascending tau, starting at -inf
  double auc = 0.0;
};

/// Mann-Whitney AUC: Pr(pos > neg) + Pr(pos == neg) / 2.
double auc_mann_whitney(std::span<const double> pos, std::span<const double> neg);

/// Empirical ROC with one operating point per distinct score (plus tau=-inf).
/// Throws InsufficientData when either sample is empty.
RocCurve roc_curve(std::span<const double> pos, std::span<const double> neg);

/// Area under the (p_fp, 1 - p_fn) polyline, closed at (0, 0) and (1, 1).
double auc_trapezoid(std::span<const OperatingPoint> points);

/// Smallest tau giving empirical p_fp <= target on `neg`, and the matching
/// true-positive rate on `pos`.
struct TprAtFpr {
  double tau = 0.0;
  double p_fp = 0.0;
  double p_tp = 0.0;
};
TprAtFpr tpr_at_fpr(std::span<const double> pos, std::span<const double> neg, double target_fp);

void write_roc_csv(std::ostream& os, const RocCurve& roc);

/// max_k score(q, r_k). Throws InsufficientData for an empty list.
double multi_group_score(const TernaryCode& q, std::span<const TernaryCode> reps);

struct GroupOperatingPoint {
  std::size_t n = 0;  ///< group size n_k
  double p_fp = 0.0;
  double p_fn = 0.0;
};

struct MultiGroupRates {
  double p_fp = 0.0;
  double p_fn = 0.0;
};

/// P_fp = 1 - prod_k (1 - p_fp_k)
/// P_fn = sum_k (n_k / N) p_fn_k prod_{l != k} (1 - p_fp_l)
/// Throws DomainError when sum n_k != N or a probability is outside [0, 1].
MultiGroupRates predict_multi_group(std::span<const GroupOperatingPoint> groups, std::size_t n_total);

/// Score samples of one group: unrelated queries scored against this
/// group's representative, and related queries whose home is this group.
struct GroupScores {
  std::size_t n = 0;
  std::vector<double> neg;
  std::vector<double> pos;
};

struct GroupTable {
  std::size_t n = 0;
  std::vector<OperatingPoint> points;  ///< evaluated at global.points[i].tau
};

struct MultiGroupPrediction {
  std::vector<GroupTable> per_group;
  RocCurve global;  ///< auc by the trapezoid rule
};

/// Sweeps tau over every observed score and combines the per-group
/// empirical operating points with predict_multi_group. A group without
/// related samples borrows the pooled p_fn of all groups.
MultiGroupPrediction predict_multi_group_roc(std::span<const GroupScores> groups,
                                             std::size_t n_total);

}  // namespace gmv
