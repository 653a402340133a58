#pragma once

#include <cstdint>
#include <vector>

#include "ecp/image_set.hpp"

namespace ecp {

inline constexpr std::uint64_t kDefaultSeed = 2024;

// Calibration / conformal-test halves of a test set.
struct SplitPair {
  ImageSet calibration;
  ImageSet cp_test;
  std::uint64_t split_seed = kDefaultSeed;
  // Positions in the source set, in the order the halves store them.
  std::vector<std::size_t> calibration_indices;
  std::vector<std::size_t> cp_test_indices;
};

// Seeded Fisher-Yates permutation of 0..n-1.
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

// Permutes the indices and assigns the first half to calibration. Requires an
// even count.
SplitPair split_test(const ImageSet& test, std::uint64_t split_seed = kDefaultSeed);

}  // namespace ecp
