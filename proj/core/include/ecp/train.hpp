#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "ecp/image_set.hpp"
#include "ecp/mlp.hpp"

namespace ecp {

enum class Optimizer : std::uint8_t { sgd, sgd_momentum };

std::string_view to_string(Optimizer o) noexcept;
Optimizer parse_optimizer(std::string_view s);

struct TrainConfig {
  std::size_t batch_size = 64;
  std::size_t epochs = 32;
  double learning_rate = 0.01;
  Optimizer optimizer = Optimizer::sgd;
  double momentum = 0.9;  // sgd_momentum only
  std::uint64_t seed = 2024;
  bool shuffle_each_epoch = true;
};

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double mean_loss = 0.0;  // over minibatches, evaluated before each update
  double accuracy = 0.0;   // same running estimate
};

struct TrainResult {
  MlpModel model;
  std::vector<EpochStats> trace;
};

using EpochCallback = std::function<void(const EpochStats&, const MlpModel&)>;

// Minibatch SGD on mean cross-entropy. `inputs` holds one normalized example
// per column. The visiting order of epoch e is a permutation seeded by
// derive_seed(cfg.seed, e), so runs are reproducible bit for bit.
TrainResult train(MlpModel model, const Eigen::MatrixXf& inputs, std::span<const Label> labels,
                  const TrainConfig& cfg, const EpochCallback& on_epoch = {});

TrainResult train(MlpModel model, const ImageSet& data, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = {});

}  // namespace ecp
