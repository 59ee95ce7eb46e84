#include "gmv/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "gmv/errors.hpp"

namespace gmv {

long squared_distance(const TernaryCode& q, const TernaryCode& r) {
  if (q.size() != r.size()) throw InvalidShape("score: code lengths differ");
  auto a = q.symbols();
  auto b = r.symbols();
  long acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const int diff = a[i] - b[i];
    acc += diff * diff;
  }
  return acc;
}

double score(const TernaryCode& q, const TernaryCode& r) {
  return -std::sqrt(static_cast<double>(squared_distance(q, r)));
}

double auc_mann_whitney(std::span<const double> pos, std::span<const double> neg) {
  if (pos.empty() || neg.empty()) throw InsufficientData("AUC needs positive and negative scores");
  std::vector<double> sorted_neg(neg.begin(), neg.end());
  std::sort(sorted_neg.begin(), sorted_neg.end());
  // Twice the U statistic, kept integral.
  long double u2 = 0;
  for (double p : pos) {
    const auto lo = std::lower_bound(sorted_neg.begin(), sorted_neg.end(), p);
    const auto hi = std::upper_bound(lo, sorted_neg.end(), p);
    u2 += 2.0L * static_cast<long double>(lo - sorted_neg.begin()) +
          static_cast<long double>(hi - lo);
  }
  return static_cast<double>(u2 / (2.0L * pos.size() * neg.size()));
}

RocCurve roc_curve(std::span<const double> pos, std::span<const double> neg) {
  if (pos.empty() || neg.empty()) throw InsufficientData("roc_curve: empty score list");
  std::vector<double> p(pos.begin(), pos.end());
  std::vector<double> n(neg.begin(), neg.end());
  std::sort(p.begin(), p.end());
  std::sort(n.begin(), n.end());
  std::vector<double> taus;
  taus.reserve(p.size() + n.size());
  std::merge(p.begin(), p.end(), n.begin(), n.end(), std::back_inserter(taus));
  taus.erase(std::unique(taus.begin(), taus.end()), taus.end());

  RocCurve roc;
  roc.points.reserve(taus.size() + 1);
  roc.points.push_back({-std::numeric_limits<double>::infinity(), 1.0, 0.0});
  const double np = static_cast<double>(p.size());
  const double nn = static_cast<double>(n.size());
  for (double tau : taus) {
    // p_fp = #{neg > tau}/|neg|, p_fn = #{pos <= tau}/|pos|
    const auto neg_above = n.end() - std::upper_bound(n.begin(), n.end(), tau);
    const auto pos_below = std::upper_bound(p.begin(), p.end(), tau) - p.begin();
    roc.points.push_back({tau, static_cast<double>(neg_above) / nn,
                          static_cast<double>(pos_below) / np});
  }
  roc.auc = auc_mann_whitney(pos, neg);
  return roc;
}

double auc_trapezoid(std::span<const OperatingPoint> points) {
  std::vector<std::pair<double, double>> xy;  // (p_fp, p_tp)
  xy.reserve(points.size() + 2);
  xy.emplace_back(0.0, 0.0);
  for (const auto& pt : points) xy.emplace_back(pt.p_fp, 1.0 - pt.p_fn);
  xy.emplace_back(1.0, 1.0);
  std::sort(xy.begin(), xy.end());
  double area = 0.0;
  for (std::size_t i = 1; i < xy.size(); ++i) {
    area += (xy[i].first - xy[i - 1].first) * (xy[i].second + xy[i - 1].second) / 2.0;
  }
  return area;
}

TprAtFpr tpr_at_fpr(std::span<const double> pos, std::span<const double> neg, double target_fp) {
  if (pos.empty() || neg.empty()) throw InsufficientData("tpr_at_fpr: empty score list");
  std::vector<double> n(neg.begin(), neg.end());
  std::sort(n.begin(), n.end());
  // Empirical (1 - target) quantile of the unrelated scores.
  const auto allowed = static_cast<std::size_t>(std::floor(target_fp * static_cast<double>(n.size())));
  const std::size_t idx = n.size() - 1 - std::min(allowed, n.size() - 1);
  const double tau = allowed >= n.size() ? -std::numeric_limits<double>::infinity() : n[idx];
  TprAtFpr out;
  out.tau = tau;
  out.p_fp = static_cast<double>(std::count_if(n.begin(), n.end(), [&](double s) { return decide(s, tau); })) /
             static_cast<double>(n.size());
  out.p_tp = static_cast<double>(std::count_if(pos.begin(), pos.end(), [&](double s) { return decide(s, tau); })) /
             static_cast<double>(pos.size());
  return out;
}

void write_roc_csv(std::ostream& os, const RocCurve& roc) {
  os << "tau,p_fp,p_fn\n";
  for (const auto& pt : roc.points) {
    os << fmt::format("{:.9g},{:.9g},{:.9g}\n", pt.tau, pt.p_fp, pt.p_fn);
  }
  os << fmt::format("auc,{:.9g},\n", roc.auc);
}

double multi_group_score(const TernaryCode& q, std::span<const TernaryCode> reps) {
  if (reps.empty()) throw InsufficientData("multi_group_score: no representatives");
  long best = std::numeric_limits<long>::max();
  for (const auto& r : reps) best = std::min(best, squared_distance(q, r));
  return -std::sqrt(static_cast<double>(best));
}

MultiGroupRates predict_multi_group(std::span<const GroupOperatingPoint> groups, std::size_t n_total) {
  if (groups.empty()) throw DomainError("predict_multi_group: no groups");
  std::size_t sum = 0;
  for (const auto& g : groups) {
    if (!(g.p_fp >= 0.0 && g.p_fp <= 1.0 && g.p_fn >= 0.0 && g.p_fn <= 1.0)) {
      throw DomainError("predict_multi_group: probability outside [0, 1]");
    }
    sum += g.n;
  }
  if (sum != n_total) throw DomainError("predict_multi_group: group sizes do not sum to N");

  // prod_{l != k} (1 - p_fp_l) from prefix and suffix products, so that a
  // group with p_fp = 1 needs no division.
  const std::size_t m = groups.size();
  std::vector<double> prefix(m + 1, 1.0), suffix(m + 1, 1.0);
  for (std::size_t k = 0; k < m; ++k) prefix[k + 1] = prefix[k] * (1.0 - groups[k].p_fp);
  for (std::size_t k = m; k-- > 0;) suffix[k] = suffix[k + 1] * (1.0 - groups[k].p_fp);

  MultiGroupRates out;
  out.p_fp = 1.0 - prefix[m];
  for (std::size_t k = 0; k < m; ++k) {
    out.p_fn += static_cast<double>(groups[k].n) / static_cast<double>(n_total) * groups[k].p_fn *
                prefix[k] * suffix[k + 1];
  }
  return out;
}

MultiGroupPrediction predict_multi_group_roc(std::span<const GroupScores> groups, std::size_t n_total) {
  if (groups.empty()) throw InsufficientData("predict_multi_group_roc: no groups");
  struct Sorted {
    std::vector<double> neg, pos;
  };
  std::vector<Sorted> sorted(groups.size());
  std::vector<double> taus;
  std::vector<double> pooled_pos;
  for (std::size_t k = 0; k < groups.size(); ++k) {
    if (groups[k].neg.empty()) throw InsufficientData("predict_multi_group_roc: group without unrelated scores");
    sorted[k].neg = groups[k].neg;
    sorted[k].pos = groups[k].pos;
    std::sort(sorted[k].neg.begin(), sorted[k].neg.end());
    std::sort(sorted[k].pos.begin(), sorted[k].pos.end());
    taus.insert(taus.end(), groups[k].neg.begin(), groups[k].neg.end());
    taus.insert(taus.end(), groups[k].pos.begin(), groups[k].pos.end());
    pooled_pos.insert(pooled_pos.end(), groups[k].pos.begin(), groups[k].pos.end());
  }
  if (pooled_pos.empty()) throw InsufficientData("predict_multi_group_roc: no related scores");
  std::sort(pooled_pos.begin(), pooled_pos.end());
  std::sort(taus.begin(), taus.end());
  taus.erase(std::unique(taus.begin(), taus.end()), taus.end());
  taus.insert(taus.begin(), -std::numeric_limits<double>::infinity());

  auto frac_above = [](const std::vector<double>& v, double tau) {
    return static_cast<double>(v.end() - std::upper_bound(v.begin(), v.end(), tau)) /
           static_cast<double>(v.size());
  };
  auto frac_at_or_below = [](const std::vector<double>& v, double tau) {
    return static_cast<double>(std::upper_bound(v.begin(), v.end(), tau) - v.begin()) /
           static_cast<double>(v.size());
  };

  MultiGroupPrediction out;
  out.per_group.resize(groups.size());
  for (std::size_t k = 0; k < groups.size(); ++k) {
    out.per_group[k].n = groups[k].n;
    out.per_group[k].points.reserve(taus.size());
  }
  out.global.points.reserve(taus.size());
  std::vector<GroupOperatingPoint> ops(groups.size());
  for (double tau : taus) {
    for (std::size_t k = 0; k < groups.size(); ++k) {
      const auto& pos = sorted[k].pos.empty() ? pooled_pos : sorted[k].pos;
      ops[k] = {groups[k].n, frac_above(sorted[k].neg, tau), frac_at_or_below(pos, tau)};
      out.per_group[k].points.push_back({tau, ops[k].p_fp, ops[k].p_fn});
    }
    const MultiGroupRates rates = predict_multi_group(ops, n_total);
    out.global.points.push_back({tau, rates.p_fp, rates.p_fn});
  }
  out.global.auc = auc_trapezoid(out.global.points);
  return out;
}

}  // namespace gmv
