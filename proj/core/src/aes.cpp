#include "ecp/aes.hpp"

#include <string>

#include "ecp/errors.hpp"

namespace ecp {
namespace {

constexpr std::uint8_t xtime(std::uint8_t x) {
  return std::uint8_t((x << 1) ^ ((x & 0x80) ? 0x1b : 0x00));
}

constexpr std::uint8_t gmul(std::uint8_t a, std::uint8_t b) {
  std::uint8_t p = 0;
  while (b != 0) {
    if (b & 1) p ^= a;
    a = xtime(a);
    b >>= 1;
  }
  return p;
}

constexpr std::uint8_t rotl8(std::uint8_t x, int s) {
  return std::uint8_t((x << s) | (x >> (8 - s)));
}

// S-box: multiplicative inverse in GF(2^8) followed by the affine map.
constexpr std::array<std::uint8_t, 256> make_sbox() {
  std::array<std::uint8_t, 256> s{};
  for (int x = 0; x < 256; ++x) {
    std::uint8_t inv = 0;
    if (x != 0) {
      for (int y = 1; y < 256; ++y) {
        if (gmul(std::uint8_t(x), std::uint8_t(y)) == 1) {
          inv = std::uint8_t(y);
          break;
        }
      }
    }
    s[std::size_t(x)] = std::uint8_t(inv ^ rotl8(inv, 1) ^ rotl8(inv, 2) ^ rotl8(inv, 3) ^
                                      rotl8(inv, 4) ^ 0x63);
  }
  return s;
}

constexpr std::array<std::uint8_t, 256> make_inv_sbox(const std::array<std::uint8_t, 256>& s) {
  std::array<std::uint8_t, 256> inv{};
  for (int x = 0; x < 256; ++x) inv[s[std::size_t(x)]] = std::uint8_t(x);
  return inv;
}

constexpr auto kSbox = make_sbox();
constexpr auto kInvSbox = make_inv_sbox(kSbox);

static_assert(kSbox[0x00] == 0x63 && kSbox[0x53] == 0xed && kSbox[0xff] == 0x16);

// State is column-major: byte (row r, column c) lives at index 4*c + r.
using State = AesBlock;

void add_round_key(State& s, const std::uint8_t* rk) {
  for (std::size_t i = 0; i < 16; ++i) s[i] ^= rk[i];
}

void sub_bytes(State& s) {
  for (auto& b : s) b = kSbox[b];
}

void inv_sub_bytes(State& s) {
  for (auto& b : s) b = kInvSbox[b];
}

void shift_rows(State& s) {
  State t = s;
  for (std::size_t r = 1; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) s[4 * c + r] = t[4 * ((c + r) % 4) + r];
}

void inv_shift_rows(State& s) {
  State t = s;
  for (std::size_t r = 1; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) s[4 * ((c + r) % 4) + r] = t[4 * c + r];
}

void mix_columns(State& s) {
  for (std::size_t c = 0; c < 4; ++c) {
    std::uint8_t* col = &s[4 * c];
    const std::uint8_t a0 = col[0], a1 = col[1], a2 = col[2], a3 = col[3];
    col[0] = std::uint8_t(xtime(a0) ^ (xtime(a1) ^ a1) ^ a2 ^ a3);
    col[1] = std::uint8_t(a0 ^ xtime(a1) ^ (xtime(a2) ^ a2) ^ a3);
    col[2] = std::uint8_t(a0 ^ a1 ^ xtime(a2) ^ (xtime(a3) ^ a3));
    col[3] = std::uint8_t((xtime(a0) ^ a0) ^ a1 ^ a2 ^ xtime(a3));
  }
}

void inv_mix_columns(State& s) {
  for (std::size_t c = 0; c < 4; ++c) {
    std::uint8_t* col = &s[4 * c];
    const std::uint8_t a0 = col[0], a1 = col[1], a2 = col[2], a3 = col[3];
    col[0] = std::uint8_t(gmul(a0, 14) ^ gmul(a1, 11) ^ gmul(a2, 13) ^ gmul(a3, 9));
    col[1] = std::uint8_t(gmul(a0, 9) ^ gmul(a1, 14) ^ gmul(a2, 11) ^ gmul(a3, 13));
    col[2] = std::uint8_t(gmul(a0, 13) ^ gmul(a1, 9) ^ gmul(a2, 14) ^ gmul(a3, 11));
    col[3] = std::uint8_t(gmul(a0, 11) ^ gmul(a1, 13) ^ gmul(a2, 9) ^ gmul(a3, 14));
  }
}

void check_length(std::size_t n) {
  if (n == 0 || n % kAesBlockBytes != 0) {
    throw Error(ErrorKind::padding, "CBC without padding needs a positive multiple of 16 bytes, got " +
                                        std::to_string(n));
  }
}

}  // namespace

Aes128::Aes128(const AesKey128& key) {
  std::copy(key.begin(), key.end(), round_keys_.begin());
  std::uint8_t rcon = 0x01;
  for (std::size_t i = 16; i < round_keys_.size(); i += 4) {
    std::uint8_t t[4] = {round_keys_[i - 4], round_keys_[i - 3], round_keys_[i - 2],
                         round_keys_[i - 1]};
    if (i % 16 == 0) {
      // RotWord, SubWord, Rcon
      const std::uint8_t first = t[0];
      t[0] = std::uint8_t(kSbox[t[1]] ^ rcon);
      t[1] = kSbox[t[2]];
      t[2] = kSbox[t[3]];
      t[3] = kSbox[first];
      rcon = xtime(rcon);
    }
    for (std::size_t k = 0; k < 4; ++k) round_keys_[i + k] = round_keys_[i - 16 + k] ^ t[k];
  }
}

AesBlock Aes128::encrypt_block(const AesBlock& in) const noexcept {
  State s = in;
  add_round_key(s, round_keys_.data());
  for (std::size_t round = 1; round < 10; ++round) {
    sub_bytes(s);
    shift_rows(s);
    mix_columns(s);
    add_round_key(s, round_keys_.data() + 16 * round);
  }
  sub_bytes(s);
  shift_rows(s);
  add_round_key(s, round_keys_.data() + 160);
  return s;
}

AesBlock Aes128::decrypt_block(const AesBlock& in) const noexcept {
  State s = in;
  add_round_key(s, round_keys_.data() + 160);
  for (std::size_t round = 9; round >= 1; --round) {
    inv_shift_rows(s);
    inv_sub_bytes(s);
    add_round_key(s, round_keys_.data() + 16 * round);
    inv_mix_columns(s);
  }
  inv_shift_rows(s);
  inv_sub_bytes(s);
  add_round_key(s, round_keys_.data());
  return s;
}

void cbc_encrypt_inplace(const Aes128& cipher, const AesBlock& iv, std::span<std::uint8_t> data) {
  check_length(data.size());
  AesBlock chain = iv;
  for (std::size_t off = 0; off < data.size(); off += kAesBlockBytes) {
    AesBlock block;
    for (std::size_t i = 0; i < kAesBlockBytes; ++i) block[i] = data[off + i] ^ chain[i];
    chain = cipher.encrypt_block(block);
    std::copy(chain.begin(), chain.end(), data.begin() + std::ptrdiff_t(off));
  }
}

void cbc_decrypt_inplace(const Aes128& cipher, const AesBlock& iv, std::span<std::uint8_t> data) {
  check_length(data.size());
  AesBlock chain = iv;
  for (std::size_t off = 0; off < data.size(); off += kAesBlockBytes) {
    AesBlock block;
    std::copy_n(data.begin() + std::ptrdiff_t(off), kAesBlockBytes, block.begin());
    const AesBlock plain = cipher.decrypt_block(block);
    for (std::size_t i = 0; i < kAesBlockBytes; ++i) data[off + i] = plain[i] ^ chain[i];
    chain = block;
  }
}

std::vector<std::uint8_t> aes128_cbc_encrypt(std::span<const std::uint8_t> plaintext,
                                             const AesKey128& key, const AesBlock& iv) {
  std::vector<std::uint8_t> out(plaintext.begin(), plaintext.end());
  cbc_encrypt_inplace(Aes128(key), iv, out);
  return out;
}

std::vector<std::uint8_t> aes128_cbc_decrypt(std::span<const std::uint8_t> ciphertext,
                                             const AesKey128& key, const AesBlock& iv) {
  std::vector<std::uint8_t> out(ciphertext.begin(), ciphertext.end());
  cbc_decrypt_inplace(Aes128(key), iv, out);
  return out;
}

}  // namespace ecp
