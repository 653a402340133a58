#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace ecp {

inline constexpr std::size_t kImageRows = 28;
inline constexpr std::size_t kImageCols = 28;
inline constexpr std::size_t kImageBytes = kImageRows * kImageCols;  // 784
inline constexpr std::size_t kNumClasses = 10;

using ImageView = std::span<const std::uint8_t, kImageBytes>;
using Label = std::uint8_t;

enum class Provenance : std::uint8_t {
  plaintext = 0,
  encrypted_fixed = 1,
  encrypted_per_sample = 2,
};

std::string_view to_string(Provenance p) noexcept;

// Images stored contiguously, one 784-byte row-major record per example.
class ImageSet {
 public:
  ImageSet() = default;
  ImageSet(std::vector<std::uint8_t> pixels, std::vector<Label> labels, Provenance provenance);

  std::size_t count() const noexcept { return labels_.size(); }
  bool empty() const noexcept { return labels_.empty(); }
  Provenance provenance() const noexcept { return provenance_; }

  ImageView image(std::size_t i) const {
    return ImageView(pixels_.data() + i * kImageBytes, kImageBytes);
  }
  Label label(std::size_t i) const { return labels_[i]; }

  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
  std::span<const Label> labels() const noexcept { return labels_; }

  // Examples at the given indices, in that order.
  ImageSet subset(std::span<const std::size_t> indices) const;
  // The first n examples.
  ImageSet head(std::size_t n) const;

  // 64-bit FNV-1a over labels and pixels; identifies a dataset in manifests.
  std::uint64_t fingerprint() const noexcept;

  friend bool operator==(const ImageSet&, const ImageSet&) = default;

 private:
  std::vector<std::uint8_t> pixels_;
  std::vector<Label> labels_;
  Provenance provenance_ = Provenance::plaintext;
};

// byte / 255, identical for plaintext and ciphertext bytes.
std::vector<float> normalize(std::span<const std::uint8_t> image);

// All images of a set normalized into a 784 x count column-major matrix
// (one example per column).
Eigen::MatrixXf normalize_columns(const ImageSet& set);

inline constexpr float normalize_byte(std::uint8_t b) noexcept { return float(b) / 255.0f; }

}  // namespace ecp
