#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "ecp/image_set.hpp"

namespace ecp {

enum class Activation : std::uint8_t { relu = 0, softmax = 1 };

std::string_view to_string(Activation a) noexcept;

// Layer widths from input to output, e.g. {784, 512, 256, 10}. Hidden layers
// use ReLU, the last layer softmax.
struct Architecture {
  std::string arch_id;
  std::vector<std::size_t> dims;

  friend bool operator==(const Architecture&, const Architecture&) = default;
};

// 784 -> 512 (relu) -> 256 (relu) -> 10 (softmax), tagged "ref-v1".
Architecture reference_architecture();

// Parses "784-512-256-10" into an architecture with the given id.
Architecture parse_architecture(std::string_view dims, std::string arch_id);
std::string format_dims(const Architecture& arch);

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

template <typename T>
struct DenseLayer {
  Mat<T> weight;  // out x in
  Vec<T> bias;    // out
  Activation activation = Activation::relu;
};

template <typename T>
class BasicMlp {
 public:
  BasicMlp() = default;
  // Throws an architecture error unless the layers chain and end in softmax.
  BasicMlp(Architecture arch, std::vector<DenseLayer<T>> layers, std::uint64_t train_seed);

  const Architecture& architecture() const noexcept { return arch_; }
  std::vector<DenseLayer<T>>& layers() noexcept { return layers_; }
  const std::vector<DenseLayer<T>>& layers() const noexcept { return layers_; }
  std::size_t input_dim() const noexcept { return arch_.dims.front(); }
  std::size_t output_dim() const noexcept { return arch_.dims.back(); }
  std::uint64_t train_seed() const noexcept { return train_seed_; }
  std::size_t parameter_count() const noexcept;

  // Pre-softmax scores for a batch laid out one example per column.
  Mat<T> logits(const Mat<T>& inputs) const;
  // Softmax probabilities, one column per example.
  Mat<T> predict_proba(const Mat<T>& inputs) const;

  template <typename U>
  BasicMlp<U> cast() const {
    std::vector<DenseLayer<U>> out;
    out.reserve(layers_.size());
    for (const auto& l : layers_) {
      out.push_back({l.weight.template cast<U>(), l.bias.template cast<U>(), l.activation});
    }
    return BasicMlp<U>(arch_, std::move(out), train_seed_);
  }

 private:
  Architecture arch_;
  std::vector<DenseLayer<T>> layers_;
  std::uint64_t train_seed_ = 0;
};

using MlpModel = BasicMlp<float>;

// Glorot-uniform weights (bound sqrt(6/(fan_in+fan_out))), zero biases.
MlpModel init_model(const Architecture& arch, std::uint64_t seed);

// Column-wise softmax with max subtraction.
template <typename T>
Mat<T> softmax_columns(const Mat<T>& logits);

// Class probabilities for one example. The logits come from the float
// network; the softmax itself is evaluated in double. Non-finite input is a
// numeric error.
Eigen::VectorXd forward(const MlpModel& model, std::span<const float> x);

inline constexpr double kLossFloor = 1e-12;

// -log(max(p[label], 1e-12)).
double cross_entropy(const Eigen::VectorXd& probs, std::size_t label);

// argmax per column.
std::vector<Label> predict_labels(const MlpModel& model, const Eigen::MatrixXf& inputs);

double accuracy(const MlpModel& model, const Eigen::MatrixXf& inputs, std::span<const Label> labels);
double accuracy(const MlpModel& model, const ImageSet& data);

// Forward/backward pass state for mean cross-entropy over a batch.
template <typename T>
struct Gradients {
  std::vector<Mat<T>> weight;
  std::vector<Vec<T>> bias;

  void resize_like(const BasicMlp<T>& model);
};

struct BatchLoss {
  double loss = 0.0;     // mean cross-entropy over the batch
  std::size_t correct = 0;
};

// Fills `grads` with d(mean loss)/d(parameters) for the batch.
template <typename T>
BatchLoss backprop(const BasicMlp<T>& model, const Mat<T>& inputs, std::span<const Label> labels,
                   Gradients<T>& grads);

// Mean cross-entropy only, same definition as backprop's loss.
template <typename T>
double batch_loss(const BasicMlp<T>& model, const Mat<T>& inputs, std::span<const Label> labels);

}  // namespace ecp
