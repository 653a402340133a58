#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "ecp/image_set.hpp"

namespace ecp {

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

// Reads an MNIST image/label IDX pair. Files may be raw or gzip-compressed;
// compression is detected from the stream, not the file name.
ImageSet load_idx(const std::filesystem::path& images_path,
                  const std::filesystem::path& labels_path);

// Writes uncompressed IDX files; load_idx(write_idx(s)) reproduces s.
void write_idx(const ImageSet& set, const std::filesystem::path& images_path,
               const std::filesystem::path& labels_path);

// Whole-file read with transparent gzip decompression.
std::vector<std::uint8_t> read_maybe_gzip(const std::filesystem::path& path);

struct MnistFiles {
  std::filesystem::path train_images;
  std::filesystem::path train_labels;
  std::filesystem::path test_images;
  std::filesystem::path test_labels;
};

// Locates the standard file names in `dir`, preferring raw over ".gz".
MnistFiles locate_mnist(const std::filesystem::path& dir);

}  // namespace ecp
