#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>

#include "ecp/cipher.hpp"
#include "ecp/manifest.hpp"
#include "ecp/pipeline.hpp"

#ifndef ECP_DEFAULT_MNIST_DIR
#define ECP_DEFAULT_MNIST_DIR "data/mnist"
#endif

namespace ecp::cli {

struct Io {
  std::ostream& out;  // results
  std::ostream& err;  // progress
};

struct DataOptions {
  std::string mnist = ECP_DEFAULT_MNIST_DIR;
  // A regime name (plaintext, fixed, per-sample) or a directory written by
  // `ecp encrypt`.
  std::string data = "fixed";
  std::string key = std::string(kReferenceKeyText);  // 16 chars, or hex:<32 digits>
  std::string iv = std::string(kReferenceIvText);
  std::uint64_t cipher_seed = 2024;
};

struct EncryptOptions {
  std::string mnist = ECP_DEFAULT_MNIST_DIR;
  std::string out = "out/encrypted";
  std::string mode = "fixed";  // fixed | per-sample | none
  std::string key = std::string(kReferenceKeyText);
  std::string iv = std::string(kReferenceIvText);
  std::uint64_t seed = 2024;  // per-sample key stream
};

struct TrainOptions {
  DataOptions data;
  std::string out = "out/train";
  std::size_t epochs = 32;
  std::size_t batch_size = 64;
  double lr = 0.01;
  std::string optimizer = "sgd";
  double momentum = 0.9;
  std::uint64_t seed = 2024;
  std::string arch = "784-512-256-10";
  std::string arch_id = "ref-v1";
  std::size_t repeats = 1;
  std::string init_model;
  std::size_t train_limit = 0;  // 0 keeps the whole training set
};

struct ConformalOptions {
  DataOptions data;
  std::string out = "out/conformal";
  std::string model = "out/train/model.ecpm";
  std::string rule = "both";  // e | p | both
  double alpha = 0.4;
  double epsilon = 0.4;
  std::uint64_t split_seed = 2024;
  bool summary = false;
  std::size_t bins = 50;
};

struct VizOptions {
  DataOptions data;
  std::string out = "out/viz";
  std::string figure = "all";  // tsne | digit | calibration | all
  std::string regime = "fixed";  // plaintext | fixed | per-sample | all
  std::size_t index = 0;
  std::size_t samples = 10000;
  double perplexity = 30.0;
  std::size_t iterations = 1000;
  std::uint64_t tsne_seed = 2024;
  std::string model = "out/train/model.ecpm";
  std::uint64_t split_seed = 2024;
  std::size_t bins = 50;
};

struct ValidateOptions {
  std::string out = "out/validate";
  std::size_t trials = 10000;
  std::uint64_t seed = 2024;
  std::string inject_fault;  // test hook: "cipher" corrupts the AES suite
};

struct ReproduceOptions {
  std::string mnist = ECP_DEFAULT_MNIST_DIR;
  std::string out = "out/reproduce";
  std::size_t epochs = 32;
  std::size_t tsne_samples = 10000;
  std::size_t tsne_iterations = 1000;
  std::size_t trials = 10000;
  std::size_t train_limit = 0;
  std::uint64_t seed = 2024;
};

int cmd_encrypt(const EncryptOptions& o, Io io);
int cmd_train(const TrainOptions& o, Io io);
int cmd_conformal(const ConformalOptions& o, Io io);
int cmd_viz(const VizOptions& o, Io io);
int cmd_validate(const ValidateOptions& o, Io io);
int cmd_reproduce(const ReproduceOptions& o, Io io);

// Shared helpers.
AesBlock parse_block(const std::string& text);
std::string format_block(const AesBlock& b);
std::uint64_t file_hash(const std::filesystem::path& path);
void record_output(Manifest& m, const std::filesystem::path& path);
DataPair load_data(const DataOptions& o, std::string* description = nullptr);
void set_data_options(Manifest& m, const DataOptions& o);

}  // namespace ecp::cli
