#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "commands.hpp"
#include "ecp/evaluation.hpp"
#include "ecp/mlp.hpp"
#include "ecp/train.hpp"
#include "ecp/tsne.hpp"

namespace ecp::cli {

struct TrainSpec {
  TrainConfig cfg;
  Architecture arch = reference_architecture();
  std::optional<MlpModel> init;
  std::size_t repeats = 1;
  std::string label;
};

struct TrainOutcome {
  MlpModel model;  // first repeat
  std::vector<double> accuracies;
  MeanStd summary;
  double seconds = 0.0;
};

// Repeat r trains with seed cfg.seed + r. Writes model.ecpm (repeat 0),
// model_r<r>.ecpm when repeating, and train_trace.csv.
TrainOutcome train_repeats(const DataPair& d, const TrainSpec& spec, const std::filesystem::path& out, Io io);

struct ConformalSpec {
  double alpha = 0.4;
  double epsilon = 0.4;
  bool run_e = true;
  bool run_p = true;
  std::uint64_t split_seed = 2024;
  bool summary = false;
  std::size_t bins = 50;
  std::string source;
};

struct ConformalOutcome {
  std::size_t calibration_n = 0;
  double calibration_mean = 0.0;
  double e_factor = 0.0;
  std::size_t p_rank = 0;
  std::optional<PredictionReport> e;
  std::optional<PredictionReport> p;
  std::optional<bool> p_within_e;  // every p-set inside its e-set
  std::vector<std::filesystem::path> files;
};

ConformalOutcome run_conformal(const MlpModel& model, const ImageSet& test, const ConformalSpec& spec,
                               const std::filesystem::path& out, Io io);
void add_conformal_results(Manifest& m, const ConformalOutcome& c);

std::vector<std::filesystem::path> digit_figure(const ImageSet& plain_train, std::size_t index,
                                                const std::vector<Regime>& regimes, const CipherConfig& base,
                                                std::uint64_t cipher_seed, const std::filesystem::path& out);

struct TsneOutcome {
  double ratio = 0.0;
  double kl = 0.0;
  double seconds = 0.0;
  std::filesystem::path file;
};

TsneOutcome tsne_figure(const ImageSet& plain_train, Regime regime, std::size_t samples, const TsneConfig& cfg,
                        const CipherConfig& base, std::uint64_t cipher_seed, const std::filesystem::path& out,
                        Io io);

std::string sizes_string(const SizeHistogram& h);

}  // namespace ecp::cli
