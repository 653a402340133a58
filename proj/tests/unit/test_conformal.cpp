#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "ecp/conformal.hpp"
#include "ecp/errors.hpp"
#include "ecp/lemma_mc.hpp"
#include "ecp/mlp.hpp"
#include "ecp/rng.hpp"

namespace ecp {
namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an ecp::Error";
  return ErrorKind::validation;
}

// Counting oracle: the smallest k whose order statistic leaves at least
// (1 - eps)(n + 1) - 1 calibration scores strictly below it, evaluated in
// rational arithmetic on integer grids of eps.
std::size_t rank_by_count(std::size_t n, std::size_t eps_num, std::size_t eps_den) {
  // k = floor((den - num)(n + 1) / den)
  return (eps_den - eps_num) * (n + 1) / eps_den;
}

TEST(PRank, MatchesIntegerOracle) {
  for (std::size_t n = 1; n <= 1000; ++n) {
    for (std::size_t num = 1; num < 20; ++num) {
      const double eps = double(num) / 20.0;
      const std::size_t k = rank_by_count(n, num, 20);
      if (k < 1 || k > n) {
        EXPECT_EQ(kind_of([&] { p_rank(n, eps); }), ErrorKind::coverage_infeasible) << n << " " << eps;
      } else {
        ASSERT_EQ(p_rank(n, eps), k) << n << " " << eps;
      }
    }
  }
}

TEST(PRank, ReferenceValues) {
  EXPECT_EQ(p_rank(5000, 0.4), 3000u);
  EXPECT_EQ(p_rank(9, 0.5), 5u);
  EXPECT_EQ(p_rank(4, 0.8), 1u);
  EXPECT_EQ(p_rank(3, 0.1), 3u);  // floor never exceeds n
  EXPECT_EQ(p_rank(3, 1e-9), 3u);
  EXPECT_EQ(kind_of([] { p_rank(3, 0.9); }), ErrorKind::coverage_infeasible);
}

TEST(PThreshold, FullSortOracleRandomEpsilon) {
  Rng rng(13);
  std::vector<double> eps(100);
  for (auto& e : eps) e = rng.uniform(0.01, 0.99);
  for (std::size_t n = 1; n <= 1000; n += 37) {
    std::vector<double> s(n);
    for (auto& v : s) v = rng.uniform();
    const CalibrationScores c(s);
    std::sort(s.begin(), s.end());
    for (double e : eps) {
      const double pos = (1.0 - e) * double(n + 1);
      const auto k = std::size_t(std::floor(pos));
      if (k < 1 || k > n) continue;
      ASSERT_EQ(p_threshold(c, e), s[k - 1]) << n << " " << e;
    }
  }
}

TEST(PThreshold, OrderStatistic) {
  const CalibrationScores cal({9, 3, 1, 7, 5, 2, 8, 4, 6});
  EXPECT_EQ(p_threshold(cal, 0.5), 5.0);
  const CalibrationScores four({0.4, 0.1, 0.3, 0.2});
  EXPECT_EQ(p_threshold(four, 0.8), 0.1);  // minimum
  // Oracle on random data: threshold is the k-th smallest by nth_element.
  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> s(10 + rng.below(990));
    for (auto& v : s) v = rng.exponential();
    const CalibrationScores c(s);
    std::size_t k = p_rank(s.size(), 0.4);
    std::nth_element(s.begin(), s.begin() + std::ptrdiff_t(k - 1), s.end());
    EXPECT_EQ(p_threshold(c, 0.4), s[k - 1]);
  }
}

TEST(EFactor, ExactValues) {
  EXPECT_NEAR(e_factor(0.4, 5000), 25000.0 / 9997.0, 1e-12);
  EXPECT_NEAR(e_factor(0.4, 5000), 2.50075022506752, 1e-12);
  EXPECT_DOUBLE_EQ(e_factor(1.0, 17), 1.0);
  EXPECT_EQ(kind_of([] { e_factor(0.0, 10); }), ErrorKind::config);
  EXPECT_EQ(kind_of([] { e_factor(1.5, 10); }), ErrorKind::config);
  EXPECT_EQ(kind_of([] { e_factor(0.1, 9); }), ErrorKind::coverage_infeasible);
  EXPECT_NEAR(e_factor(0.1, 10), 100.0, 1e-9);
  // Decreases towards 1/alpha from above as n grows.
  for (std::size_t n = 4; n < 2000; ++n) EXPECT_GT(e_factor(0.25, n), e_factor(0.25, n + 1));
  EXPECT_GT(e_factor(0.25, 100000), 4.0);
  EXPECT_NEAR(e_factor(0.25, 100000), 4.0, 1e-3);
}

TEST(EThreshold, MeanTimesFactor) {
  const CalibrationScores cal({1.0, 2.0, 3.0, 6.0});
  EXPECT_DOUBLE_EQ(cal.mean(), 3.0);
  EXPECT_DOUBLE_EQ(e_threshold(cal, 1.0), 3.0);
  EXPECT_NEAR(e_threshold(cal, 0.5), 3.0 * 2.0 / (1.0 - 1.0 / 4.0), 1e-12);
  EXPECT_EQ(kind_of([] { e_threshold(CalibrationScores({0.0, 0.0}), 0.4); }), ErrorKind::degenerate_calibration);
  EXPECT_EQ(threshold_for(cal, Rule::e_value(0.5)), e_threshold(cal, 0.5));
  EXPECT_EQ(threshold_for(cal, Rule::p_value(0.5)), p_threshold(cal, 0.5));
}

TEST(EThreshold, FactorTimesMeanSweep) {
  Rng rng(21);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> s(1 + rng.below(3000));
    for (auto& v : s) v = rng.pareto(1.5);
    const CalibrationScores c(s);
    const double alpha = rng.uniform(0.01, 1.0);
    if (alpha * double(s.size() + 1) <= 1.0) continue;
    const double mean = std::accumulate(s.begin(), s.end(), 0.0) / double(s.size());
    const double n = double(s.size());
    const double oracle = mean * (1.0 / alpha) / (1.0 + (1.0 - 1.0 / alpha) / n);
    EXPECT_NEAR(e_threshold(c, alpha) / oracle, 1.0, 1e-12);
  }
}

TEST(CalibrationScores, Validation) {
  EXPECT_EQ(kind_of([] { CalibrationScores(std::vector<double>{}); }), ErrorKind::degenerate_calibration);
  EXPECT_EQ(kind_of([] { CalibrationScores({1.0, -0.1}); }), ErrorKind::precondition);
  EXPECT_EQ(kind_of([] { CalibrationScores({1.0, NAN}); }), ErrorKind::precondition);
  const CalibrationScores c({3, 1, 2});
  EXPECT_TRUE(std::is_sorted(c.scores().begin(), c.scores().end()));
  EXPECT_EQ(c.max(), 3.0);
}

TEST(Score, NegativeLogProbability) {
  MlpModel m = init_model({"t", {4, 3, 10}}, 1);
  m.layers().back().weight.setZero();
  const std::vector<float> x(4, 0.5f);
  for (std::size_t y = 0; y < 10; ++y) EXPECT_NEAR(score(m, x, y), std::log(10.0), 1e-12);
  Eigen::MatrixXf xs = Eigen::MatrixXf::Constant(4, 3, 0.5f);
  const Eigen::MatrixXd s = candidate_scores(m, xs);
  ASSERT_EQ(s.rows(), 3);
  ASSERT_EQ(s.cols(), 10);
  EXPECT_NEAR(s(2, 7), std::log(10.0), 1e-9);
  const std::vector<Label> labels{1, 2, 3};
  const auto t = true_label_scores(s, labels);
  EXPECT_EQ(t[1], s(1, 2));
}

TEST(PredictionSet, StrictInequalityAndEdges) {
  const std::vector<double> s{0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0};
  const auto r = Rule::p_value(0.4);
  EXPECT_EQ(predict_set(s, 0.5, r).size(), 0u);  // ties are excluded
  EXPECT_EQ(predict_set(s, 0.50001, r).members(), std::vector<Label>{0});
  EXPECT_EQ(predict_set(s, 100.0, r).size(), 10u);
  EXPECT_EQ(predict_set(s, 100.0, r).labels, 0x3ffu);
  const auto mid = predict_set(s, 2.2, r, 42);
  EXPECT_EQ(mid.members(), (std::vector<Label>{0, 1, 2, 3}));
  EXPECT_EQ(mid.example_id, 42u);
  EXPECT_TRUE(mid.contains(3));
  EXPECT_FALSE(mid.contains(4));
}

TEST(PredictionSet, MonotoneInThresholdProperty) {
  Rng rng(11);
  for (int t = 0; t < 500; ++t) {
    std::vector<double> s(10);
    for (auto& v : s) v = rng.exponential();
    const double a = rng.uniform(0, 3), b = rng.uniform(0, 3);
    const auto lo = predict_set(s, std::min(a, b), Rule::e_value(0.4));
    const auto hi = predict_set(s, std::max(a, b), Rule::e_value(0.4));
    EXPECT_EQ(lo.labels & ~hi.labels, 0u);
    EXPECT_LE(lo.size(), hi.size());
  }
}

TEST(PredictionSet, BatchMatchesSingle) {
  Rng rng(2);
  Eigen::MatrixXd s(20, 10);
  for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = rng.exponential();
  const auto sets = predict_sets(s, 0.8, Rule::p_value(0.4));
  ASSERT_EQ(sets.size(), 20u);
  for (Eigen::Index i = 0; i < 20; ++i) {
    std::vector<double> row(10);
    for (Eigen::Index j = 0; j < 10; ++j) row[std::size_t(j)] = s(i, j);
    EXPECT_EQ(sets[std::size_t(i)].labels, predict_set(row, 0.8, Rule::p_value(0.4)).labels);
    EXPECT_EQ(sets[std::size_t(i)].example_id, std::size_t(i));
  }
}

TEST(ScoreHistogram, CountsEverything) {
  const CalibrationScores c({0.0, 0.1, 0.5, 0.9, 1.0});
  const auto h = score_histogram(c, 10);
  EXPECT_EQ(h.counts.size(), 10u);
  EXPECT_EQ(std::accumulate(h.counts.begin(), h.counts.end(), std::size_t{0}), 5u);
  EXPECT_EQ(h.counts.back(), 2u);  // 0.9 and the maximum
  const auto flat = score_histogram(CalibrationScores({2.0, 2.0}), 5);
  EXPECT_EQ(std::count_if(flat.counts.begin(), flat.counts.end(), [](std::size_t c) { return c > 0; }), 1);
}

TEST(Lemma1, CoverageAtLeastNominal) {
  for (const auto& d : {ScoreSampler::uniform(), ScoreSampler::exponential(), ScoreSampler::pareto(1.5)}) {
    for (std::size_t n : {50u, 500u}) {
      const auto r = mc_validate_lemma1(n, 0.4, 4000, d);
      EXPECT_TRUE(r.passed) << d.name() << " n=" << n << " freq " << r.frequency;
      EXPECT_NEAR(r.sigma, std::sqrt(0.24 / 4000), 1e-15);
      EXPECT_NEAR(r.bound, 0.6 - 3 * r.sigma, 1e-15);
    }
  }
  const auto u = mc_validate_lemma1(99, 0.1, 100000, ScoreSampler::uniform());
  EXPECT_TRUE(u.passed) << u.frequency;
  const auto c = mc_validate_lemma1(50, 0.4, 1000, ScoreSampler::constant(1.0));
  // All ties: every score is at least as large as the last one.
  EXPECT_EQ(c.frequency, 1.0);
  EXPECT_TRUE(c.passed);
}

TEST(Lemma2, ViolationsAtMostAlpha) {
  for (const auto& d : {ScoreSampler::uniform(), ScoreSampler::exponential(), ScoreSampler::pareto(1.5)}) {
    const auto r = mc_validate_lemma2(500, 0.4, 4000, d);
    EXPECT_TRUE(r.passed) << d.name() << " freq " << r.frequency;
    EXPECT_LE(r.frequency, 0.4);
  }
  const auto c = mc_validate_lemma2(50, 0.4, 1000, ScoreSampler::constant(1.0));
  EXPECT_EQ(c.frequency, 0.0);
  EXPECT_TRUE(c.passed);
}

TEST(Lemma, TenfoldTrialsTightenSigma) {
  const auto a = mc_validate_lemma1(50, 0.4, 10000, ScoreSampler::uniform());
  const auto b = mc_validate_lemma1(50, 0.4, 100000, ScoreSampler::uniform());
  EXPECT_NEAR(b.sigma * std::sqrt(10.0), a.sigma, 1e-15);
  EXPECT_GT(b.bound, a.bound);
  EXPECT_TRUE(b.passed);
}

TEST(Lemma, ReproducibleBySeed) {
  const auto a = mc_validate_lemma1(100, 0.2, 500, ScoreSampler::exponential(), 9);
  const auto b = mc_validate_lemma1(100, 0.2, 500, ScoreSampler::exponential(), 9);
  EXPECT_EQ(a.frequency, b.frequency);
}

}  // namespace
}  // namespace ecp
