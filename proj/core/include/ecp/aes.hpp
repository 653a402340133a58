#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace ecp {

inline constexpr std::size_t kAesBlockBytes = 16;

using AesBlock = std::array<std::uint8_t, kAesBlockBytes>;
using AesKey128 = std::array<std::uint8_t, 16>;

// AES-128 block cipher (FIPS-197) with an expanded key schedule.
class Aes128 {
 public:
  explicit Aes128(const AesKey128& key);

  AesBlock encrypt_block(const AesBlock& in) const noexcept;
  AesBlock decrypt_block(const AesBlock& in) const noexcept;

 private:
  std::array<std::uint8_t, 176> round_keys_{};
};

// CBC with no padding. Lengths must be a positive multiple of 16 or a
// padding error is thrown.
std::vector<std::uint8_t> aes128_cbc_encrypt(std::span<const std::uint8_t> plaintext,
                                             const AesKey128& key, const AesBlock& iv);
std::vector<std::uint8_t> aes128_cbc_decrypt(std::span<const std::uint8_t> ciphertext,
                                             const AesKey128& key, const AesBlock& iv);

// In-place variants over a caller-owned buffer, used by the dataset encryptor.
void cbc_encrypt_inplace(const Aes128& cipher, const AesBlock& iv, std::span<std::uint8_t> data);
void cbc_decrypt_inplace(const Aes128& cipher, const AesBlock& iv, std::span<std::uint8_t> data);

}  // namespace ecp
