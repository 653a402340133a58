#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "ecp/cipher.hpp"
#include "ecp/image_set.hpp"

namespace ecp {

// The three data regimes compared throughout: raw pixels, one fixed key for
// every image, and a fresh key per image.
enum class Regime : std::uint8_t { plaintext, fixed, per_sample };

std::string_view to_string(Regime r) noexcept;
Regime parse_regime(std::string_view s);  // plaintext | fixed | per-sample

struct DataPair {
  ImageSet train;
  ImageSet test;
};

DataPair load_mnist(const std::filesystem::path& dir);

// Per-sample keys for the train and test sets come from distinct streams of
// the same seed, so no two images anywhere share key material.
std::uint64_t per_sample_stream_seed(std::uint64_t seed, bool test_set);

// Applies a regime to one plaintext set. Per-sample keys depend on the image's
// position in `set`, so a prefix of a set encrypts the same as the full set.
ImageSet apply_regime(const ImageSet& set, Regime regime, const CipherConfig& base, std::uint64_t per_sample_seed,
                      bool test_set);

// Applies a regime to plaintext MNIST. `base` supplies key and IV for the
// fixed regime; `per_sample_seed` drives the per-sample regime.
DataPair make_regime(const DataPair& plain, Regime regime, const CipherConfig& base,
                     std::uint64_t per_sample_seed);

}  // namespace ecp
