#include "ecp/mlp.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "ecp/errors.hpp"
#include "ecp/rng.hpp"

namespace ecp {

std::string_view to_string(Activation a) noexcept { return a == Activation::relu ? "relu" : "softmax"; }

Architecture reference_architecture() { return {"ref-v1", {kImageBytes, 512, 256, kNumClasses}}; }

Architecture parse_architecture(std::string_view dims, std::string arch_id) {
  Architecture arch{std::move(arch_id), {}};
  std::size_t pos = 0;
  while (pos <= dims.size()) {
    const std::size_t dash = std::min(dims.find('-', pos), dims.size());
    const std::string_view tok = dims.substr(pos, dash - pos);
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || v == 0) {
      throw Error(ErrorKind::architecture, "bad layer width '" + std::string(tok) + "'");
    }
    arch.dims.push_back(v);
    pos = dash + 1;
  }
  if (arch.dims.size() < 2) throw Error(ErrorKind::architecture, "need at least input and output widths");
  return arch;
}

std::string format_dims(const Architecture& arch) {
  std::string s;
  for (std::size_t i = 0; i < arch.dims.size(); ++i) {
    if (i) s += '-';
    s += std::to_string(arch.dims[i]);
  }
  return s;
}

template <typename T>
BasicMlp<T>::BasicMlp(Architecture arch, std::vector<DenseLayer<T>> layers, std::uint64_t train_seed)
    : arch_(std::move(arch)), layers_(std::move(layers)), train_seed_(train_seed) {
  if (arch_.dims.size() < 2 || layers_.size() != arch_.dims.size() - 1) {
    throw Error(ErrorKind::architecture, "layer count does not match architecture");
  }
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& l = layers_[i];
    if (std::size_t(l.weight.cols()) != arch_.dims[i] ||
        std::size_t(l.weight.rows()) != arch_.dims[i + 1] || l.bias.size() != l.weight.rows()) {
      throw Error(ErrorKind::architecture, "layer " + std::to_string(i) + " does not chain");
    }
    const Activation want = i + 1 == layers_.size() ? Activation::softmax : Activation::relu;
    if (l.activation != want) {
      throw Error(ErrorKind::architecture, "layer " + std::to_string(i) + " must use " +
                                               std::string(to_string(want)));
    }
  }
}

template <typename T>
std::size_t BasicMlp<T>::parameter_count() const noexcept {
  std::size_t n = 0;
  for (const auto& l : layers_) n += std::size_t(l.weight.size() + l.bias.size());
  return n;
}

template <typename T>
Mat<T> BasicMlp<T>::logits(const Mat<T>& inputs) const {
  Mat<T> h = inputs;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& l = layers_[i];
    Mat<T> z = l.weight * h;
    z.colwise() += l.bias;
    if (l.activation == Activation::relu) z = z.cwiseMax(T(0));
    h = std::move(z);
  }
  return h;
}

template <typename T>
Mat<T> softmax_columns(const Mat<T>& logits) {
  Mat<T> p(logits.rows(), logits.cols());
  for (Eigen::Index c = 0; c < logits.cols(); ++c) {
    const T m = logits.col(c).maxCoeff();
    p.col(c) = (logits.col(c).array() - m).exp();
    p.col(c) /= p.col(c).sum();
  }
  return p;
}

template <typename T>
Mat<T> BasicMlp<T>::predict_proba(const Mat<T>& inputs) const {
  return softmax_columns<T>(logits(inputs));
}

MlpModel init_model(const Architecture& arch, std::uint64_t seed) {
  if (arch.dims.size() < 2) throw Error(ErrorKind::architecture, "need at least input and output widths");
  Rng rng(seed);
  std::vector<DenseLayer<float>> layers;
  for (std::size_t i = 0; i + 1 < arch.dims.size(); ++i) {
    const std::size_t fan_in = arch.dims[i], fan_out = arch.dims[i + 1];
    const double bound = std::sqrt(6.0 / double(fan_in + fan_out));
    DenseLayer<float> l;
    l.weight.resize(Eigen::Index(fan_out), Eigen::Index(fan_in));
    // Fill row by row so the draw order matches the row-major file layout.
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = float(rng.uniform(-bound, bound));
    l.bias = Eigen::VectorXf::Zero(Eigen::Index(fan_out));
    l.activation = i + 2 == arch.dims.size() ? Activation::softmax : Activation::relu;
    layers.push_back(std::move(l));
  }
  return MlpModel(arch, std::move(layers), seed);
}

Eigen::VectorXd forward(const MlpModel& model, std::span<const float> x) {
  if (x.size() != model.input_dim()) {
    throw Error(ErrorKind::architecture, "input has " + std::to_string(x.size()) + " features, model expects " +
                                             std::to_string(model.input_dim()));
  }
  if (!std::all_of(x.begin(), x.end(), [](float v) { return std::isfinite(v); })) {
    throw Error(ErrorKind::numeric, "non-finite input feature");
  }
  const Eigen::Map<const Eigen::MatrixXf> in(x.data(), Eigen::Index(x.size()), 1);
  const Eigen::MatrixXd z = model.logits(in).cast<double>();
  return softmax_columns<double>(z).col(0);
}

double cross_entropy(const Eigen::VectorXd& probs, std::size_t label) {
  if (label >= std::size_t(probs.size())) {
    throw Error(ErrorKind::index, "label " + std::to_string(label) + " out of range");
  }
  return -std::log(std::max(probs[Eigen::Index(label)], kLossFloor));
}

std::vector<Label> predict_labels(const MlpModel& model, const Eigen::MatrixXf& inputs) {
  std::vector<Label> out(std::size_t(inputs.cols()));
  constexpr Eigen::Index kChunk = 1024;
  for (Eigen::Index start = 0; start < inputs.cols(); start += kChunk) {
    const Eigen::Index n = std::min(kChunk, inputs.cols() - start);
    const Eigen::MatrixXf z = model.logits(inputs.middleCols(start, n));
    for (Eigen::Index c = 0; c < n; ++c) {
      Eigen::Index arg = 0;
      z.col(c).maxCoeff(&arg);
      out[std::size_t(start + c)] = Label(arg);
    }
  }
  return out;
}

double accuracy(const MlpModel& model, const Eigen::MatrixXf& inputs, std::span<const Label> labels) {
  if (labels.empty()) return 0.0;
  const auto pred = predict_labels(model, inputs);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hits += pred[i] == labels[i];
  return double(hits) / double(labels.size());
}

double accuracy(const MlpModel& model, const ImageSet& data) {
  return accuracy(model, normalize_columns(data), data.labels());
}

template <typename T>
void Gradients<T>::resize_like(const BasicMlp<T>& model) {
  weight.resize(model.layers().size());
  bias.resize(model.layers().size());
  for (std::size_t i = 0; i < model.layers().size(); ++i) {
    weight[i].resize(model.layers()[i].weight.rows(), model.layers()[i].weight.cols());
    bias[i].resize(model.layers()[i].bias.size());
  }
}

namespace {

// log-sum-exp per column minus the label logit.
template <typename T>
double mean_log_loss(const Mat<T>& z, std::span<const Label> labels, std::size_t* correct) {
  double total = 0.0;
  for (Eigen::Index c = 0; c < z.cols(); ++c) {
    Eigen::Index arg = 0;
    const T m = z.col(c).maxCoeff(&arg);
    const double lse = double(m) + std::log(double((z.col(c).array() - m).exp().sum()));
    total += lse - double(z(Eigen::Index(labels[std::size_t(c)]), c));
    if (correct && std::size_t(arg) == labels[std::size_t(c)]) ++*correct;
  }
  return total / double(z.cols());
}

}  // namespace

template <typename T>
BatchLoss backprop(const BasicMlp<T>& model, const Mat<T>& inputs, std::span<const Label> labels,
                   Gradients<T>& grads) {
  const auto& layers = model.layers();
  const std::size_t depth = layers.size();
  const Eigen::Index batch = inputs.cols();
  if (std::size_t(batch) != labels.size()) throw Error(ErrorKind::consistency, "batch/label size mismatch");
  if (grads.weight.size() != depth) grads.resize_like(model);

  // acts[i] is the input to layer i; acts[depth] holds the logits.
  std::vector<Mat<T>> acts(depth + 1);
  acts[0] = inputs;
  for (std::size_t i = 0; i < depth; ++i) {
    acts[i + 1].noalias() = layers[i].weight * acts[i];
    acts[i + 1].colwise() += layers[i].bias;
    if (layers[i].activation == Activation::relu) acts[i + 1] = acts[i + 1].cwiseMax(T(0));
  }

  BatchLoss out;
  out.loss = mean_log_loss<T>(acts[depth], labels, &out.correct);

  // d(mean CE)/d(logits) = (softmax - onehot) / batch
  Mat<T> delta = softmax_columns<T>(acts[depth]);
  for (Eigen::Index c = 0; c < batch; ++c) delta(Eigen::Index(labels[std::size_t(c)]), c) -= T(1);
  delta /= T(batch);

  for (std::size_t i = depth; i-- > 0;) {
    grads.weight[i].noalias() = delta * acts[i].transpose();
    grads.bias[i] = delta.rowwise().sum();
    if (i == 0) break;
    Mat<T> prev = layers[i].weight.transpose() * delta;
    // ReLU derivative from the post-activation value.
    prev = (acts[i].array() > T(0)).select(prev, T(0));
    delta = std::move(prev);
  }
  return out;
}

template <typename T>
double batch_loss(const BasicMlp<T>& model, const Mat<T>& inputs, std::span<const Label> labels) {
  return mean_log_loss<T>(model.logits(inputs), labels, nullptr);
}

template class BasicMlp<float>;
template class BasicMlp<double>;
template struct Gradients<float>;
template struct Gradients<double>;
template Mat<float> softmax_columns<float>(const Mat<float>&);
template Mat<double> softmax_columns<double>(const Mat<double>&);
template BatchLoss backprop<float>(const BasicMlp<float>&, const Mat<float>&, std::span<const Label>,
                                   Gradients<float>&);
template BatchLoss backprop<double>(const BasicMlp<double>&, const Mat<double>&, std::span<const Label>,
                                    Gradients<double>&);
template double batch_loss<float>(const BasicMlp<float>&, const Mat<float>&, std::span<const Label>);
template double batch_loss<double>(const BasicMlp<double>&, const Mat<double>&, std::span<const Label>);

}  // namespace ecp
