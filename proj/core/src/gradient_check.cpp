#include "ecp/gradient_check.hpp"

#include <algorithm>
#include <cmath>

#include "ecp/errors.hpp"
#include "ecp/rng.hpp"

namespace ecp {
namespace {

std::vector<bool> relu_pattern(const BasicMlp<double>& model, const Eigen::VectorXd& x) {
  std::vector<bool> pattern;
  Eigen::MatrixXd h = x;
  for (const auto& l : model.layers()) {
    Eigen::MatrixXd z = l.weight * h;
    z.colwise() += l.bias;
    if (l.activation == Activation::relu) {
      for (Eigen::Index i = 0; i < z.size(); ++i) pattern.push_back(z(i) > 0.0);
      z = z.cwiseMax(0.0);
    }
    h = std::move(z);
  }
  return pattern;
}

double loss_at(const BasicMlp<double>& model, const Eigen::VectorXd& x, std::size_t label) {
  const Label y = Label(label);
  return batch_loss<double>(model, x, std::span(&y, 1));
}

}  // namespace

double relative_error(double analytic, double numeric) noexcept {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
  return std::abs(analytic - numeric) / denom;
}

double& param(BasicMlp<double>& model, const ParamRef& p) {
  auto& l = model.layers().at(p.layer);
  return p.is_bias ? l.bias(p.row) : l.weight(p.row, p.col);
}

double analytic_gradient(const BasicMlp<double>& model, const Eigen::VectorXd& x, std::size_t label,
                         const ParamRef& p) {
  Gradients<double> g;
  const Label y = Label(label);
  backprop<double>(model, x, std::span(&y, 1), g);
  return p.is_bias ? g.bias[p.layer](p.row) : g.weight[p.layer](p.row, p.col);
}

double central_difference(const BasicMlp<double>& model, const Eigen::VectorXd& x, std::size_t label,
                          const ParamRef& p, double step) {
  BasicMlp<double> m = model;
  double& v = param(m, p);
  const double orig = v;
  v = orig + step;
  const double up = loss_at(m, x, label);
  v = orig - step;
  const double down = loss_at(m, x, label);
  return (up - down) / (2.0 * step);
}

GradientCheckResult gradient_check(const BasicMlp<double>& model, const Eigen::VectorXd& x,
                                   std::size_t label, const GradientCheckOptions& opts) {
  if (label >= model.output_dim()) throw Error(ErrorKind::index, "label out of range");
  if (std::size_t(x.size()) != model.input_dim()) throw Error(ErrorKind::architecture, "input size mismatch");

  std::vector<ParamRef> all;
  for (std::size_t li = 0; li < model.layers().size(); ++li) {
    const auto& l = model.layers()[li];
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) all.push_back({li, false, r, c});
      all.push_back({li, true, r, 0});
    }
  }
  Rng rng(opts.seed);
  if (all.size() > opts.samples) {
    // Partial Fisher-Yates: the first `samples` entries become a uniform draw.
    for (std::size_t i = 0; i < opts.samples; ++i) std::swap(all[i], all[i + rng.below(all.size() - i)]);
    all.resize(opts.samples);
  }

  Gradients<double> g;
  const Label y = Label(label);
  backprop<double>(model, x, std::span(&y, 1), g);
  const auto base = relu_pattern(model, x);

  GradientCheckResult res;
  BasicMlp<double> probe = model;
  for (const ParamRef& p : all) {
    double& v = param(probe, p);
    const double orig = v;
    v = orig + opts.step;
    const bool flip_up = relu_pattern(probe, x) != base;
    const double up = loss_at(probe, x, label);
    v = orig - opts.step;
    const bool flip_down = relu_pattern(probe, x) != base;
    const double down = loss_at(probe, x, label);
    v = orig;
    if (flip_up || flip_down) {
      ++res.skipped_kinks;
      continue;
    }
    const double numeric = (up - down) / (2.0 * opts.step);
    const double analytic = p.is_bias ? g.bias[p.layer](p.row) : g.weight[p.layer](p.row, p.col);
    res.max_relative_error = std::max(res.max_relative_error, relative_error(analytic, numeric));
    ++res.checked;
  }
  return res;
}

GradientCheckResult gradient_check(const MlpModel& model, std::span<const float> x, std::size_t label,
                                   const GradientCheckOptions& opts) {
  Eigen::VectorXd xd(Eigen::Index(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) xd(Eigen::Index(i)) = x[i];
  return gradient_check(model.cast<double>(), xd, label, opts);
}

NetworkSweepResult random_network_sweep(std::size_t networks, std::uint64_t seed, const GradientCheckOptions& opts) {
  NetworkSweepResult r;
  Rng rng(seed);
  for (std::size_t t = 0; t < networks; ++t) {
    const std::size_t in = 4 + rng.below(28);
    std::vector<std::size_t> dims{in, 3 + rng.below(24)};
    if (rng.below(2)) dims.push_back(3 + rng.below(16));
    dims.push_back(kNumClasses);
    MlpModel m = init_model({"sweep", dims}, derive_seed(seed, t));
    for (auto& l : m.layers())
      for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias(i) = float(rng.uniform(-0.5, 0.5));
    std::vector<float> x(in);
    for (auto& v : x) v = float(rng.uniform());
    GradientCheckOptions o = opts;
    o.seed = derive_seed(seed ^ 0x5eedull, t);
    const GradientCheckResult g = gradient_check(m, x, rng.below(kNumClasses), o);
    r.checked += g.checked;
    if (g.max_relative_error > r.max_relative_error || t == 0) {
      r.max_relative_error = std::max(r.max_relative_error, g.max_relative_error);
      r.worst_network = t;
    }
    ++r.networks;
  }
  return r;
}

}  // namespace ecp
