#pragma once

#include <cstdint>
#include <filesystem>
#include <span>

#include "ecp/conformal.hpp"
#include "ecp/tsne.hpp"

namespace ecp {

// Binary portable graymap (P5, maxval 255).
void write_pgm(const std::filesystem::path& path, std::span<const std::uint8_t> pixels, std::size_t width,
               std::size_t height);

// A 784-byte record (plaintext or ciphertext) as a 28x28 raster.
void render_digit(std::span<const std::uint8_t> image, const std::filesystem::path& path);

struct LossPlotFiles {
  std::filesystem::path histogram;  // bin,lo,hi,count
  std::filesystem::path sorted;     // rank,score
};

// Writes calibration_histogram.csv and calibration_sorted.csv into `dir`.
LossPlotFiles loss_plots(const CalibrationScores& cal, const std::filesystem::path& dir, std::size_t bins = 50);

// index,score in calibration-set order.
void write_scores_csv(std::span<const double> scores, const std::filesystem::path& path);

// index,x,y,label
void write_embedding_csv(const Embedding2D& emb, const std::filesystem::path& path);

}  // namespace ecp
