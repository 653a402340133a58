#include "ecp/cipher.hpp"

#include <string>
#include <vector>

#include "ecp/errors.hpp"
#include "ecp/rng.hpp"

namespace ecp {

std::string_view to_string(CipherMode m) noexcept {
  return m == CipherMode::fixed ? "fixed" : "per_sample";
}

AesBlock block_from_text(std::string_view text) {
  if (text.size() != kAesBlockBytes) {
    throw Error(ErrorKind::config,
                "key/IV text must be exactly 16 bytes, got " + std::to_string(text.size()));
  }
  AesBlock b{};
  for (std::size_t i = 0; i < kAesBlockBytes; ++i) b[i] = std::uint8_t(text[i]);
  return b;
}

AesBlock block_from_hex(std::string_view hex) {
  if (hex.size() != 2 * kAesBlockBytes) {
    throw Error(ErrorKind::config, "hex key/IV must have 32 digits");
  }
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw Error(ErrorKind::config, std::string("bad hex digit '") + c + "'");
  };
  AesBlock b{};
  for (std::size_t i = 0; i < kAesBlockBytes; ++i) {
    b[i] = std::uint8_t(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
  }
  return b;
}

namespace {

AesKey128 generator_key(std::uint64_t seed) {
  AesKey128 k{};
  const std::uint64_t a = derive_seed(seed, 0x6b6579), b = derive_seed(seed, 0x6b657932);
  for (std::size_t i = 0; i < 8; ++i) {
    k[i] = std::uint8_t(a >> (8 * i));
    k[8 + i] = std::uint8_t(b >> (8 * i));
  }
  return k;
}

AesBlock counter_block(std::uint64_t index, std::uint64_t lane) {
  AesBlock c{};
  for (std::size_t i = 0; i < 8; ++i) {
    c[i] = std::uint8_t(index >> (8 * i));
    c[8 + i] = std::uint8_t(lane >> (8 * i));
  }
  return c;
}

void check_config(const CipherConfig& cfg) {
  if (cfg.padding != Padding::none) throw Error(ErrorKind::padding, "only padding=none is supported");
}

}  // namespace

KeyIv per_sample_key(std::uint64_t seed, std::uint64_t index) {
  const Aes128 gen(generator_key(seed));
  return {gen.encrypt_block(counter_block(index, 0)), gen.encrypt_block(counter_block(index, 1))};
}

ImageSet encrypt_dataset(const ImageSet& set, const CipherConfig& cfg) {
  check_config(cfg);
  if (set.provenance() != Provenance::plaintext) {
    throw Error(ErrorKind::precondition,
                std::string("dataset is already ") + std::string(to_string(set.provenance())));
  }
  std::vector<std::uint8_t> px(set.pixels().begin(), set.pixels().end());
  if (cfg.mode == CipherMode::fixed) {
    const Aes128 cipher(cfg.key);
    for (std::size_t i = 0; i < set.count(); ++i) {
      cbc_encrypt_inplace(cipher, cfg.iv, std::span(px).subspan(i * kImageBytes, kImageBytes));
    }
  } else {
    const Aes128 gen(generator_key(cfg.per_sample_seed));
    for (std::size_t i = 0; i < set.count(); ++i) {
      const AesKey128 key = gen.encrypt_block(counter_block(i, 0));
      const AesBlock iv = gen.encrypt_block(counter_block(i, 1));
      cbc_encrypt_inplace(Aes128(key), iv, std::span(px).subspan(i * kImageBytes, kImageBytes));
    }
  }
  const Provenance p = cfg.mode == CipherMode::fixed ? Provenance::encrypted_fixed
                                                     : Provenance::encrypted_per_sample;
  return ImageSet(std::move(px), std::vector<Label>(set.labels().begin(), set.labels().end()), p);
}

ImageSet decrypt_dataset(const ImageSet& set, const CipherConfig& cfg) {
  check_config(cfg);
  const Provenance expected = cfg.mode == CipherMode::fixed ? Provenance::encrypted_fixed
                                                            : Provenance::encrypted_per_sample;
  if (set.provenance() != expected) {
    throw Error(ErrorKind::precondition, "dataset provenance does not match cipher mode");
  }
  std::vector<std::uint8_t> px(set.pixels().begin(), set.pixels().end());
  const Aes128 fixed_cipher(cfg.key);
  for (std::size_t i = 0; i < set.count(); ++i) {
    const auto span = std::span(px).subspan(i * kImageBytes, kImageBytes);
    if (cfg.mode == CipherMode::fixed) {
      cbc_decrypt_inplace(fixed_cipher, cfg.iv, span);
    } else {
      const auto [key, iv] = per_sample_key(cfg.per_sample_seed, i);
      cbc_decrypt_inplace(Aes128(key), iv, span);
    }
  }
  return ImageSet(std::move(px), std::vector<Label>(set.labels().begin(), set.labels().end()),
                  Provenance::plaintext);
}

}  // namespace ecp
