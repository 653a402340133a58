#include "ecp/split.hpp"

#include <numeric>
#include <string>

#include "ecp/errors.hpp"
#include "ecp/rng.hpp"

namespace ecp {

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = rng.below(i);
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

SplitPair split_test(const ImageSet& test, std::uint64_t split_seed) {
  if (test.count() % 2 != 0) {
    throw Error(ErrorKind::precondition,
                "split needs an even count, got " + std::to_string(test.count()));
  }
  const auto perm = seeded_permutation(test.count(), split_seed);
  const std::size_t half = perm.size() / 2;
  SplitPair out;
  out.split_seed = split_seed;
  out.calibration_indices.assign(perm.begin(), perm.begin() + std::ptrdiff_t(half));
  out.cp_test_indices.assign(perm.begin() + std::ptrdiff_t(half), perm.end());
  out.calibration = test.subset(out.calibration_indices);
  out.cp_test = test.subset(out.cp_test_indices);
  return out;
}

}  // namespace ecp
