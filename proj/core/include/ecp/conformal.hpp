#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "ecp/image_set.hpp"
#include "ecp/mlp.hpp"

namespace ecp {

// Nonconformity scores of the calibration split at the true labels, sorted
// ascending.
class CalibrationScores {
 public:
  CalibrationScores() = default;
  // Sorts; throws a precondition error on negative or non-finite scores and
  // a degenerate-calibration error on an empty list.
  explicit CalibrationScores(std::vector<double> scores, std::string source = {});

  std::span<const double> scores() const noexcept { return scores_; }
  std::size_t n() const noexcept { return scores_.size(); }
  const std::string& source() const noexcept { return source_; }
  double mean() const noexcept;
  double max() const noexcept { return scores_.back(); }

 private:
  std::vector<double> scores_;
  std::string source_;
};

struct Rule {
  enum class Kind : std::uint8_t { p_value, e_value };
  Kind kind = Kind::p_value;
  double level = 0.4;  // epsilon for p_value, alpha for e_value

  static Rule p_value(double epsilon) { return {Kind::p_value, epsilon}; }
  static Rule e_value(double alpha) { return {Kind::e_value, alpha}; }
  std::string name() const;  // "p" or "e"
};

using LabelMask = std::uint16_t;

struct PredictionSet {
  LabelMask labels = 0;  // bit y set iff class y is in the set
  std::size_t example_id = 0;
  Rule rule;
  double threshold = 0.0;

  bool contains(std::size_t y) const noexcept { return (labels >> y) & 1u; }
  std::size_t size() const noexcept;
  std::vector<Label> members() const;
};

// Cross-entropy of the model's prediction at candidate label y.
double score(const MlpModel& model, std::span<const float> x, std::size_t y);

// Scores of every candidate label: one row per example, one column per class.
Eigen::MatrixXd candidate_scores(const MlpModel& model, const ImageSet& data);
Eigen::MatrixXd candidate_scores(const MlpModel& model, const Eigen::MatrixXf& inputs);

// Row i's entry at labels[i], in example order.
std::vector<double> true_label_scores(const Eigen::MatrixXd& scores, std::span<const Label> labels);

CalibrationScores calibrate(const MlpModel& model, const ImageSet& cal, std::string source = {});

// 1-based rank floor((1 - epsilon)(n + 1)); coverage-infeasible error unless
// it lands in [1, n].
std::size_t p_rank(std::size_t n, double epsilon);
double p_threshold(const CalibrationScores& cal, double epsilon);

// (1/alpha) / (1 + (1 - 1/alpha)/n)
double e_factor(double alpha, std::size_t n);
double e_threshold(const CalibrationScores& cal, double alpha);

double threshold_for(const CalibrationScores& cal, const Rule& rule);

// Labels whose score is strictly below the threshold.
PredictionSet predict_set(std::span<const double> label_scores, double threshold, const Rule& rule,
                          std::size_t example_id = 0);
PredictionSet predict_set(const MlpModel& model, std::span<const float> x, double threshold,
                          const Rule& rule, std::size_t example_id = 0);
std::vector<PredictionSet> predict_sets(const Eigen::MatrixXd& scores, double threshold, const Rule& rule);

// Fixed-width bins over [0, max score]; the top edge is closed.
struct ScoreHistogram {
  double lo = 0.0;
  double width = 0.0;
  std::vector<std::size_t> counts;
};

ScoreHistogram score_histogram(const CalibrationScores& cal, std::size_t bins = 50);

}  // namespace ecp
