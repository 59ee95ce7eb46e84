#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "gmv/errors.hpp"
#include "gmv/rng.hpp"
#include "gmv/verification.hpp"

using namespace gmv;

namespace {

double brute_force_auc(const std::vector<double>& pos, const std::vector<double>& neg) {
  double wins = 0.0;
  for (double p : pos)
    for (double n : neg) wins += p > n ? 1.0 : (p == n ? 0.5 : 0.0);
  return wins / static_cast<double>(pos.size() * neg.size());
}

std::vector<double> integer_scores(Rng& rng, std::size_t n, int lo, int hi) {
  std::uniform_int_distribution<int> u(lo, hi);
  std::vector<double> out(n);
  for (auto& v : out) v = u(rng);
  return out;
}

}  // namespace

TEST_CASE("score") {
  const TernaryCode a({1, 0, -1, 0});
  CHECK(score(a, a) == 0.0);
  CHECK(score(a, TernaryCode({1, 1, -1, 0})) == -1.0);
  CHECK(score(TernaryCode({1, 0}), TernaryCode({-1, 1})) == doctest::Approx(-std::sqrt(5.0)));
  CHECK_THROWS_AS(score(a, TernaryCode(3)), InvalidShape);
}

TEST_CASE("decide is strict") {
  CHECK(decide(0.0, -0.5));
  CHECK_FALSE(decide(-3.0, -3.0));
  CHECK(decide(-1.0, -2.0));
}

TEST_CASE("roc_curve") {
  SUBCASE("separable") {
    const std::vector<double> pos{3, 4, 5}, neg{0, 1, 2};
    CHECK(roc_curve(pos, neg).auc == 1.0);
  }
  SUBCASE("identical samples") {
    const std::vector<double> s{1, 2, 2, 3};
    CHECK(roc_curve(s, s).auc == 0.5);
  }
  SUBCASE("small hand case") {
    const std::vector<double> pos{1, 3}, neg{2};
    CHECK(roc_curve(pos, neg).auc == brute_force_auc(pos, neg));
    CHECK(roc_curve(pos, neg).auc == 0.5);
  }
  SUBCASE("operating points") {
    const std::vector<double> pos{1, 3}, neg{2};
    const RocCurve roc = roc_curve(pos, neg);
    REQUIRE(roc.points.size() == 4);
    CHECK(std::isinf(roc.points[0].tau));
    CHECK(roc.points[1].tau == 1.0);
    CHECK(roc.points[1].p_fp == 1.0);
    CHECK(roc.points[1].p_fn == 0.5);
    CHECK(roc.points[2].p_fp == 0.0);
    CHECK(roc.points[3].p_fn == 1.0);
    for (std::size_t i = 1; i < roc.points.size(); ++i) {
      CHECK(roc.points[i].p_fp <= roc.points[i - 1].p_fp);
      CHECK(roc.points[i].tau > roc.points[i - 1].tau);
    }
    // The polyline through the points has the Mann-Whitney area.
    CHECK(auc_trapezoid(roc.points) == doctest::Approx(roc.auc).epsilon(1e-12));
  }
  SUBCASE("empty") {
    const std::vector<double> s{1};
    CHECK_THROWS_AS(roc_curve({}, s), InsufficientData);
    CHECK_THROWS_AS(roc_curve(s, {}), InsufficientData);
  }
}

TEST_CASE("Mann-Whitney AUC equals pair counting on random tied samples") {
  Rng rng(2024);
  std::uniform_int_distribution<std::size_t> size(1, 300);
  for (int t = 0; t < 100; ++t) {
    const auto pos = integer_scores(rng, size(rng), -20, 10);
    const auto neg = integer_scores(rng, size(rng), -25, 5);
    const RocCurve roc = roc_curve(pos, neg);
    CHECK(roc.auc == brute_force_auc(pos, neg));
    CHECK(auc_trapezoid(roc.points) == doctest::Approx(roc.auc).epsilon(1e-12));
  }
}

TEST_CASE("tpr_at_fpr") {
  std::vector<double> neg(1000), pos(10, 2000.0);
  for (std::size_t i = 0; i < neg.size(); ++i) neg[i] = static_cast<double>(i);
  const TprAtFpr op = tpr_at_fpr(pos, neg, 1e-2);
  CHECK(op.p_fp == doctest::Approx(0.01));
  CHECK(op.tau == 989.0);
  CHECK(op.p_tp == 1.0);
}

TEST_CASE("ROC CSV") {
  const std::vector<double> pos{1, 3}, neg{2};
  std::ostringstream os;
  write_roc_csv(os, roc_curve(pos, neg));
  CHECK(os.str() == "tau,p_fp,p_fn\n-inf,1,0\n1,1,0.5\n2,0,0.5\n3,0,1\nauc,0.5,\n");
}

TEST_CASE("multi_group_score") {
  const TernaryCode q({0, 0});
  const std::vector<TernaryCode> one{TernaryCode({1, 0})};
  CHECK(multi_group_score(q, one) == score(q, one[0]));
  const std::vector<TernaryCode> reps{TernaryCode({1, 0}), TernaryCode({0, 0})};
  CHECK(multi_group_score(q, reps) == 0.0);
  const std::vector<TernaryCode> reversed{reps[1], reps[0]};
  CHECK(multi_group_score(TernaryCode({1, 1}), reps) == multi_group_score(TernaryCode({1, 1}), reversed));
  CHECK_THROWS_AS(multi_group_score(q, {}), InsufficientData);
}

TEST_CASE("predict_multi_group") {
  SUBCASE("no false positives") {
    const std::vector<GroupOperatingPoint> g{{2, 0.0, 0.1}, {6, 0.0, 0.5}};
    const auto r = predict_multi_group(g, 8);
    CHECK(r.p_fp == 0.0);
    CHECK(r.p_fn == doctest::Approx(0.25 * 0.1 + 0.75 * 0.5));
  }
  SUBCASE("two groups") {
    const std::vector<GroupOperatingPoint> g{{5, 0.1, 0.2}, {5, 0.1, 0.2}};
    const auto r = predict_multi_group(g, 10);
    CHECK(r.p_fp == doctest::Approx(0.19).epsilon(1e-14));
    CHECK(r.p_fn == doctest::Approx(0.2 * 0.9).epsilon(1e-14));
  }
  SUBCASE("single group") {
    const std::vector<GroupOperatingPoint> g{{7, 0.3, 0.4}};
    const auto r = predict_multi_group(g, 7);
    CHECK(r.p_fp == doctest::Approx(0.3));
    CHECK(r.p_fn == doctest::Approx(0.4));
  }
  SUBCASE("a group with p_fp = 1") {
    const std::vector<GroupOperatingPoint> g{{1, 1.0, 0.5}, {1, 0.2, 0.5}};
    const auto r = predict_multi_group(g, 2);
    CHECK(r.p_fp == 1.0);
    CHECK(r.p_fn == doctest::Approx(0.5 * 0.5 * 0.8));
  }
  SUBCASE("errors") {
    const std::vector<GroupOperatingPoint> bad_p{{1, 1.2, 0.0}};
    CHECK_THROWS_AS(predict_multi_group(bad_p, 1), DomainError);
    const std::vector<GroupOperatingPoint> g{{3, 0.1, 0.1}};
    CHECK_THROWS_AS(predict_multi_group(g, 4), DomainError);
  }
}

TEST_CASE("predict_multi_group_roc gives a valid ROC") {
  Rng rng(5);
  std::vector<GroupScores> groups(4);
  for (auto& g : groups) {
    g.n = 25;
    g.neg = integer_scores(rng, 200, -30, -10);
    g.pos = integer_scores(rng, 40, -20, 0);
  }
  const MultiGroupPrediction pred = predict_multi_group_roc(groups, 100);
  REQUIRE(pred.per_group.size() == 4);
  for (std::size_t i = 1; i < pred.global.points.size(); ++i) {
    CHECK(pred.global.points[i].p_fp <= pred.global.points[i - 1].p_fp + 1e-15);
    CHECK(pred.global.points[i].p_fn >= pred.global.points[i - 1].p_fn - 1e-15);
  }
  CHECK(pred.global.auc > 0.5);
  CHECK(pred.global.auc <= 1.0);

  // One group: the prediction is the group's own empirical ROC.
  const std::vector<GroupScores> single{groups[0]};
  const MultiGroupPrediction one = predict_multi_group_roc(single, 25);
  CHECK(one.global.auc == doctest::Approx(auc_mann_whitney(groups[0].pos, groups[0].neg)).epsilon(1e-12));

  CHECK_THROWS_AS(predict_multi_group_roc(groups, 99), DomainError);
}
