#include "ecp/train.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "ecp/errors.hpp"
#include "ecp/rng.hpp"
#include "ecp/split.hpp"

namespace ecp {

std::string_view to_string(Optimizer o) noexcept { return o == Optimizer::sgd ? "sgd" : "sgd_momentum"; }

Optimizer parse_optimizer(std::string_view s) {
  if (s == "sgd") return Optimizer::sgd;
  if (s == "sgd_momentum" || s == "momentum") return Optimizer::sgd_momentum;
  throw Error(ErrorKind::config, "unknown optimizer '" + std::string(s) + "'");
}

TrainResult train(MlpModel model, const Eigen::MatrixXf& inputs, std::span<const Label> labels,
                  const TrainConfig& cfg, const EpochCallback& on_epoch) {
  const std::size_t n = labels.size();
  if (n == 0) throw Error(ErrorKind::precondition, "training set is empty");
  if (std::size_t(inputs.cols()) != n) throw Error(ErrorKind::consistency, "input/label count mismatch");
  if (std::size_t(inputs.rows()) != model.input_dim()) {
    throw Error(ErrorKind::architecture, "input dimension does not match model");
  }
  if (cfg.batch_size == 0 || cfg.learning_rate <= 0.0) {
    throw Error(ErrorKind::config, "batch size and learning rate must be positive");
  }

  auto& layers = model.layers();
  Gradients<float> grads;
  grads.resize_like(model);
  Gradients<float> velocity;
  if (cfg.optimizer == Optimizer::sgd_momentum) {
    velocity.resize_like(model);
    for (std::size_t i = 0; i < layers.size(); ++i) {
      velocity.weight[i].setZero();
      velocity.bias[i].setZero();
    }
  }
  const float lr = float(cfg.learning_rate);
  const float mu = float(cfg.momentum);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Eigen::MatrixXf batch_x(inputs.rows(), Eigen::Index(cfg.batch_size));
  std::vector<Label> batch_y(cfg.batch_size);

  TrainResult result;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    if (cfg.shuffle_each_epoch) order = seeded_permutation(n, derive_seed(cfg.seed, epoch));
    double loss_sum = 0.0;
    std::size_t correct = 0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t b = std::min(cfg.batch_size, n - start);
      if (std::size_t(batch_x.cols()) != b) batch_x.resize(inputs.rows(), Eigen::Index(b));
      batch_y.resize(b);
      for (std::size_t j = 0; j < b; ++j) {
        batch_x.col(Eigen::Index(j)) = inputs.col(Eigen::Index(order[start + j]));
        batch_y[j] = labels[order[start + j]];
      }
      const BatchLoss bl = backprop<float>(model, batch_x, batch_y, grads);
      if (!std::isfinite(bl.loss)) {
        throw Error(ErrorKind::training, "loss diverged in epoch " + std::to_string(epoch));
      }
      loss_sum += bl.loss;
      correct += bl.correct;
      ++batches;
      for (std::size_t i = 0; i < layers.size(); ++i) {
        if (cfg.optimizer == Optimizer::sgd) {
          layers[i].weight.noalias() -= lr * grads.weight[i];
          layers[i].bias.noalias() -= lr * grads.bias[i];
        } else {
          velocity.weight[i] = mu * velocity.weight[i] - lr * grads.weight[i];
          velocity.bias[i] = mu * velocity.bias[i] - lr * grads.bias[i];
          layers[i].weight += velocity.weight[i];
          layers[i].bias += velocity.bias[i];
        }
      }
    }
    EpochStats stats{epoch, loss_sum / double(batches), double(correct) / double(n)};
    result.trace.push_back(stats);
    if (on_epoch) on_epoch(stats, model);
  }
  result.model = std::move(model);
  return result;
}

TrainResult train(MlpModel model, const ImageSet& data, const TrainConfig& cfg, const EpochCallback& on_epoch) {
  if (data.empty()) throw Error(ErrorKind::precondition, "training set is empty");
  return train(std::move(model), normalize_columns(data), data.labels(), cfg, on_epoch);
}

}  // namespace ecp
