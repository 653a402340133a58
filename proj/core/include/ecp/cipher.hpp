#pragma once

#include <cstdint>
#include <string_view>
#include <utility>

#include "ecp/aes.hpp"
#include "ecp/image_set.hpp"

namespace ecp {

enum class CipherMode : std::uint8_t { fixed = 0, per_sample = 1 };
enum class Padding : std::uint8_t { none = 0 };

std::string_view to_string(CipherMode m) noexcept;

// The reference run's key and IV, taken byte-for-byte from their ASCII text.
inline constexpr std::string_view kReferenceKeyText = "abs2kas126oZbdXs";
inline constexpr std::string_view kReferenceIvText = "1nsdjah72MdnJ12a";

// Interprets a 16-character string as raw bytes; anything else is a config error.
AesBlock block_from_text(std::string_view text);
AesBlock block_from_hex(std::string_view hex);

struct CipherConfig {
  AesKey128 key = block_from_text(kReferenceKeyText);
  AesBlock iv = block_from_text(kReferenceIvText);
  CipherMode mode = CipherMode::fixed;
  // Only consulted in per_sample mode.
  std::uint64_t per_sample_seed = 0;
  Padding padding = Padding::none;
};

struct KeyIv {
  AesKey128 key;
  AesBlock iv;
};

// Key material for image `index` in per-sample mode. Each index draws from
// its own counter pair of an AES-CTR stream keyed by the seed, so the result
// does not depend on the order images are processed in.
KeyIv per_sample_key(std::uint64_t seed, std::uint64_t index);

// Encrypts every image of a plaintext set; labels stay in the clear.
ImageSet encrypt_dataset(const ImageSet& set, const CipherConfig& cfg);

// Inverse of encrypt_dataset, for validation only.
ImageSet decrypt_dataset(const ImageSet& set, const CipherConfig& cfg);

}  // namespace ecp
