#include "ecp/conformal.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "ecp/errors.hpp"

namespace ecp {

CalibrationScores::CalibrationScores(std::vector<double> scores, std::string source)
    : scores_(std::move(scores)), source_(std::move(source)) {
  if (scores_.empty()) throw Error(ErrorKind::degenerate_calibration, "calibration set is empty");
  for (double s : scores_) {
    if (!std::isfinite(s) || s < 0.0) {
      throw Error(ErrorKind::precondition, "calibration scores must be finite and non-negative");
    }
  }
  std::sort(scores_.begin(), scores_.end());
}

double CalibrationScores::mean() const noexcept {
  return std::accumulate(scores_.begin(), scores_.end(), 0.0) / double(scores_.size());
}

std::string Rule::name() const { return kind == Kind::p_value ? "p" : "e"; }

std::size_t PredictionSet::size() const noexcept { return std::size_t(std::popcount(labels)); }

std::vector<Label> PredictionSet::members() const {
  std::vector<Label> out;
  for (std::size_t y = 0; y < kNumClasses; ++y)
    if (contains(y)) out.push_back(Label(y));
  return out;
}

double score(const MlpModel& model, std::span<const float> x, std::size_t y) {
  return cross_entropy(forward(model, x), y);
}

Eigen::MatrixXd candidate_scores(const MlpModel& model, const Eigen::MatrixXf& inputs) {
  Eigen::MatrixXd out(inputs.cols(), Eigen::Index(model.output_dim()));
  constexpr Eigen::Index kChunk = 1024;
  for (Eigen::Index start = 0; start < inputs.cols(); start += kChunk) {
    const Eigen::Index n = std::min(kChunk, inputs.cols() - start);
    const Eigen::MatrixXd p = softmax_columns<double>(model.logits(inputs.middleCols(start, n)).cast<double>());
    out.middleRows(start, n) = -(p.array().max(kLossFloor).log()).matrix().transpose();
  }
  return out;
}

Eigen::MatrixXd candidate_scores(const MlpModel& model, const ImageSet& data) {
  return candidate_scores(model, normalize_columns(data));
}

std::vector<double> true_label_scores(const Eigen::MatrixXd& scores, std::span<const Label> labels) {
  if (std::size_t(scores.rows()) != labels.size()) {
    throw Error(ErrorKind::consistency, "one label per score row required");
  }
  std::vector<double> v(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) v[i] = scores(Eigen::Index(i), Eigen::Index(labels[i]));
  return v;
}

CalibrationScores calibrate(const MlpModel& model, const ImageSet& cal, std::string source) {
  if (cal.empty()) throw Error(ErrorKind::degenerate_calibration, "calibration set is empty");
  return CalibrationScores(true_label_scores(candidate_scores(model, cal), cal.labels()), std::move(source));
}

std::size_t p_rank(std::size_t n, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(ErrorKind::config, "epsilon must lie in (0, 1)");
  // The relative nudge absorbs representation error in decimal epsilons,
  // e.g. (1 - 0.7) * 10 evaluating to 2.9999999999999996.
  const double pos = (1.0 - epsilon) * double(n + 1);
  const double k = std::floor(pos * (1.0 + 1e-12));
  if (n == 0 || k < 1.0 || k > double(n)) {
    throw Error(ErrorKind::coverage_infeasible,
                "rank floor((1-eps)(n+1)) = " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
  }
  return std::size_t(k);
}

double p_threshold(const CalibrationScores& cal, double epsilon) {
  return cal.scores()[p_rank(cal.n(), epsilon) - 1];
}

double e_factor(double alpha, std::size_t n) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(ErrorKind::config, "alpha must lie in (0, 1]");
  if (n == 0) throw Error(ErrorKind::degenerate_calibration, "calibration set is empty");
  const double denom = 1.0 + (1.0 - 1.0 / alpha) / double(n);
  // Non-positive when alpha (n + 1) <= 1: no finite threshold attains the level.
  if (!(denom > 0.0)) throw Error(ErrorKind::coverage_infeasible, "alpha too small for the calibration size");
  return (1.0 / alpha) / denom;
}

double e_threshold(const CalibrationScores& cal, double alpha) {
  const double m = cal.mean();
  if (!(m > 0.0)) throw Error(ErrorKind::degenerate_calibration, "mean calibration score is zero");
  return e_factor(alpha, cal.n()) * m;
}

double threshold_for(const CalibrationScores& cal, const Rule& rule) {
  return rule.kind == Rule::Kind::p_value ? p_threshold(cal, rule.level) : e_threshold(cal, rule.level);
}

PredictionSet predict_set(std::span<const double> label_scores, double threshold, const Rule& rule,
                          std::size_t example_id) {
  PredictionSet s{0, example_id, rule, threshold};
  for (std::size_t y = 0; y < label_scores.size(); ++y)
    if (label_scores[y] < threshold) s.labels |= LabelMask(1u << y);
  return s;
}

PredictionSet predict_set(const MlpModel& model, std::span<const float> x, double threshold,
                          const Rule& rule, std::size_t example_id) {
  const Eigen::VectorXd p = forward(model, x);
  std::vector<double> s(std::size_t(p.size()));
  for (std::size_t y = 0; y < s.size(); ++y) s[y] = cross_entropy(p, y);
  return predict_set(s, threshold, rule, example_id);
}

std::vector<PredictionSet> predict_sets(const Eigen::MatrixXd& scores, double threshold, const Rule& rule) {
  std::vector<PredictionSet> out;
  out.reserve(std::size_t(scores.rows()));
  std::vector<double> row(std::size_t(scores.cols()));
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    for (Eigen::Index c = 0; c < scores.cols(); ++c) row[std::size_t(c)] = scores(i, c);
    out.push_back(predict_set(row, threshold, rule, std::size_t(i)));
  }
  return out;
}

ScoreHistogram score_histogram(const CalibrationScores& cal, std::size_t bins) {
  if (bins == 0) throw Error(ErrorKind::config, "histogram needs at least one bin");
  ScoreHistogram h;
  h.counts.assign(bins, 0);
  const double top = cal.n() ? cal.max() : 0.0;
  h.width = top / double(bins);
  for (double s : cal.scores()) {
    std::size_t b = h.width > 0.0 ? std::size_t(s / h.width) : 0;
    h.counts[std::min(b, bins - 1)]++;
  }
  return h;
}

}  // namespace ecp
