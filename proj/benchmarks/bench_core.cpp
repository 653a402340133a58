#include <benchmark/benchmark.h>

#include <algorithm>

#include "ecp/aes.hpp"
#include "ecp/cipher.hpp"
#include "ecp/conformal.hpp"
#include "ecp/image_set.hpp"
#include "ecp/mlp.hpp"
#include "ecp/rng.hpp"
#include "ecp/tsne.hpp"

namespace {

using namespace ecp;

std::vector<std::uint8_t> random_bytes(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::uint8_t> v(n);
  for (auto& b : v) b = std::uint8_t(rng.below(256));
  return v;
}

void BM_AesBlock(benchmark::State& state) {
  const CipherConfig cfg;
  const Aes128 aes(cfg.key);
  AesBlock b = cfg.iv;
  for (auto _ : state) {
    b = aes.encrypt_block(b);
    benchmark::DoNotOptimize(b);
  }
  state.SetBytesProcessed(std::int64_t(state.iterations()) * 16);
}
BENCHMARK(BM_AesBlock);

void BM_CbcImage(benchmark::State& state) {
  const CipherConfig cfg;
  const Aes128 aes(cfg.key);
  auto img = random_bytes(kImageBytes, 1);
  for (auto _ : state) {
    cbc_encrypt_inplace(aes, cfg.iv, img);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(std::int64_t(state.iterations()));
  state.SetBytesProcessed(std::int64_t(state.iterations()) * std::int64_t(kImageBytes));
}
BENCHMARK(BM_CbcImage);

// Includes the key schedule, as every per-sample image pays for one.
void BM_PerSampleImage(benchmark::State& state) {
  auto img = random_bytes(kImageBytes, 2);
  std::uint64_t i = 0;
  for (auto _ : state) {
    const KeyIv k = per_sample_key(2024, i++);
    cbc_encrypt_inplace(Aes128(k.key), k.iv, img);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(std::int64_t(state.iterations()));
}
BENCHMARK(BM_PerSampleImage);

void BM_MlpBatchStep(benchmark::State& state) {
  const std::size_t batch = std::size_t(state.range(0));
  const MlpModel model = init_model(reference_architecture(), 2024);
  Rng rng(3);
  Eigen::MatrixXf x(784, Eigen::Index(batch));
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = float(rng.uniform());
  std::vector<Label> y(batch);
  for (auto& l : y) l = Label(rng.below(kNumClasses));
  Gradients<float> g;
  g.resize_like(model);
  for (auto _ : state) {
    const BatchLoss l = backprop(model, x, y, g);
    benchmark::DoNotOptimize(l.loss);
  }
  state.SetItemsProcessed(std::int64_t(state.iterations() * batch));
}
BENCHMARK(BM_MlpBatchStep)->Arg(64)->Arg(256);

void BM_TsneIterations(benchmark::State& state) {
  const std::size_t n = std::size_t(state.range(0));
  Rng rng(4);
  Eigen::MatrixXd data(Eigen::Index(n), 50);
  std::vector<Label> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = Label(i % kNumClasses);
    for (Eigen::Index j = 0; j < data.cols(); ++j) data(Eigen::Index(i), j) = rng.normal() + 3.0 * double(labels[i] == j % 10);
  }
  TsneConfig cfg;
  cfg.iterations = 100;
  cfg.exaggeration_iterations = 50;
  cfg.momentum_switch = 50;
  cfg.kl_every = 1000;
  cfg.kl_tail = 0;
  for (auto _ : state) {
    const Embedding2D e = tsne(data, labels, cfg);
    benchmark::DoNotOptimize(e.points.data());
  }
  state.SetItemsProcessed(std::int64_t(state.iterations()) * 100);
  state.SetLabel("items = gradient iterations");
}
BENCHMARK(BM_TsneIterations)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_Thresholds(benchmark::State& state) {
  Rng rng(5);
  std::vector<double> s(std::size_t(state.range(0)));
  for (auto& v : s) v = -std::log(std::max(rng.uniform(), 1e-12));
  for (auto _ : state) {
    const CalibrationScores cal(s);
    benchmark::DoNotOptimize(p_threshold(cal, 0.4));
    benchmark::DoNotOptimize(e_threshold(cal, 0.4));
  }
}
BENCHMARK(BM_Thresholds)->Arg(5000);

void BM_PredictSets(benchmark::State& state) {
  Rng rng(6);
  Eigen::MatrixXd scores(kNumClasses, 5000);
  for (Eigen::Index i = 0; i < scores.size(); ++i) scores.data()[i] = rng.exponential();
  for (auto _ : state) {
    const auto sets = predict_sets(scores, 1.0, Rule::p_value(0.4));
    benchmark::DoNotOptimize(sets.data());
  }
  state.SetItemsProcessed(std::int64_t(state.iterations()) * 5000);
}
BENCHMARK(BM_PredictSets);

}  // namespace

BENCHMARK_MAIN();
