#include <gtest/gtest.h>

#include <openssl/evp.h>

#include <algorithm>
#include <bit>
#include <fstream>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "ecp/cipher.hpp"
#include "ecp/container.hpp"
#include "ecp/errors.hpp"
#include "ecp/idx.hpp"
#include "ecp/split.hpp"
#include "test_support.hpp"

namespace ecp {
namespace {

std::vector<std::uint8_t> hex(std::string_view h) {
  std::vector<std::uint8_t> out;
  for (std::size_t i = 0; i < h.size(); i += 32) {
    const auto b = block_from_hex(h.substr(i, 32));
    out.insert(out.end(), b.begin(), b.end());
  }
  return out;
}

// Independent reference: OpenSSL's AES-128-CBC with padding disabled.
std::vector<std::uint8_t> openssl_cbc(std::span<const std::uint8_t> in, const AesKey128& key, const AesBlock& iv,
                                      bool encrypt) {
  EVP_CIPHER_CTX* ctx = EVP_CIPHER_CTX_new();
  EVP_CipherInit_ex(ctx, EVP_aes_128_cbc(), nullptr, key.data(), iv.data(), encrypt ? 1 : 0);
  EVP_CIPHER_CTX_set_padding(ctx, 0);
  std::vector<std::uint8_t> out(in.size() + 16);
  int n1 = 0, n2 = 0;
  EVP_CipherUpdate(ctx, out.data(), &n1, in.data(), int(in.size()));
  EVP_CipherFinal_ex(ctx, out.data() + n1, &n2);
  EVP_CIPHER_CTX_free(ctx);
  out.resize(std::size_t(n1 + n2));
  return out;
}

TEST(Aes128, Fips197AppendixC1) {
  const AesKey128 key = block_from_hex("000102030405060708090a0b0c0d0e0f");
  const AesBlock pt = block_from_hex("00112233445566778899aabbccddeeff");
  const Aes128 aes(key);
  EXPECT_EQ(aes.encrypt_block(pt), block_from_hex("69c4e0d86a7b0430d8cdb78070b4c55a"));
  EXPECT_EQ(aes.decrypt_block(block_from_hex("69c4e0d86a7b0430d8cdb78070b4c55a")), pt);
}

TEST(Aes128, Fips197AppendixB) {
  const Aes128 aes(block_from_hex("2b7e151628aed2a6abf7158809cf4f3c"));
  EXPECT_EQ(aes.encrypt_block(block_from_hex("3243f6a8885a308d313198a2e0370734")),
            block_from_hex("3925841d02dc09fbdc118597196a0b32"));
}

TEST(Aes128Cbc, ZeroIvFirstBlockEqualsRawCipher) {
  const AesKey128 key = block_from_hex("000102030405060708090a0b0c0d0e0f");
  const AesBlock zero{};
  const auto ct = aes128_cbc_encrypt(hex("00112233445566778899aabbccddeeff"), key, zero);
  EXPECT_EQ(ct, hex("69c4e0d86a7b0430d8cdb78070b4c55a"));
  EXPECT_EQ(aes128_cbc_decrypt(ct, key, zero), hex("00112233445566778899aabbccddeeff"));
}

TEST(Aes128Cbc, Sp80038aVectors) {
  const AesKey128 key = block_from_hex("2b7e151628aed2a6abf7158809cf4f3c");
  const AesBlock iv = block_from_hex("000102030405060708090a0b0c0d0e0f");
  const auto pt = hex(
      "6bc1bee22e409f96e93d7e117393172aae2d8a571e03ac9c9eb76fac45af8e51"
      "30c81c46a35ce411e5fbc1191a0a52eff69f2445df4f9b17ad2b417be66c3710");
  const auto ct = hex(
      "7649abac8119b246cee98e9b12e9197d5086cb9b507219ee95db113a917678b2"
      "73bed6b8e3c1743b7116e69e222295163ff1caa1681fac09120eca307586e1a7");
  EXPECT_EQ(aes128_cbc_encrypt(pt, key, iv), ct);
  EXPECT_EQ(aes128_cbc_decrypt(ct, key, iv), pt);
}

TEST(Aes128Cbc, MatchesOpenSslOnRandomImages) {
  Rng rng(99);
  for (int t = 0; t < 200; ++t) {
    AesKey128 key;
    AesBlock iv;
    std::vector<std::uint8_t> img(kImageBytes);
    for (auto& b : key) b = std::uint8_t(rng.below(256));
    for (auto& b : iv) b = std::uint8_t(rng.below(256));
    for (auto& b : img) b = std::uint8_t(rng.below(256));
    const auto ct = aes128_cbc_encrypt(img, key, iv);
    ASSERT_EQ(ct, openssl_cbc(img, key, iv, true));
    ASSERT_EQ(aes128_cbc_decrypt(ct, key, iv), openssl_cbc(ct, key, iv, false));
  }
}

TEST(Aes128Cbc, RoundTripAndLengthPreservation) {
  const CipherConfig cfg;
  Rng rng(5);
  for (int t = 0; t < 1000; ++t) {
    std::vector<std::uint8_t> img(kImageBytes);
    for (auto& b : img) b = std::uint8_t(rng.below(256));
    const auto ct = aes128_cbc_encrypt(img, cfg.key, cfg.iv);
    ASSERT_EQ(ct.size(), kImageBytes);
    ASSERT_EQ(aes128_cbc_decrypt(ct, cfg.key, cfg.iv), img);
  }
  const std::vector<std::uint8_t> zeros(kImageBytes, 0);
  EXPECT_EQ(aes128_cbc_decrypt(aes128_cbc_encrypt(zeros, cfg.key, cfg.iv), cfg.key, cfg.iv), zeros);
}

TEST(Aes128Cbc, WrongKeyDoesNotRecoverPlaintext) {
  const CipherConfig cfg;
  const auto pt = hex("00112233445566778899aabbccddeeff00112233445566778899aabbccddeeff");
  const auto ct = aes128_cbc_encrypt(pt, cfg.key, cfg.iv);
  AesKey128 wrong = cfg.key;
  wrong[0] ^= 1;
  const auto bad = aes128_cbc_decrypt(ct, wrong, cfg.iv);
  EXPECT_NE(bad, pt);
  // A one-bit key change scrambles about half of the output bits.
  int differing = 0;
  for (std::size_t i = 0; i < pt.size(); ++i) differing += std::popcount(std::uint8_t(bad[i] ^ pt[i]));
  EXPECT_GT(differing, 80);
  EXPECT_LT(differing, 176);
}

TEST(Aes128Cbc, RejectsUnpaddedLengths) {
  const CipherConfig cfg;
  try {
    aes128_cbc_encrypt(std::vector<std::uint8_t>(785), cfg.key, cfg.iv);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::padding);
  }
  EXPECT_THROW(aes128_cbc_decrypt(std::vector<std::uint8_t>{}, cfg.key, cfg.iv), Error);
}

TEST(CipherConfig, ReferenceKeyIsAsciiBytes) {
  const CipherConfig cfg;
  EXPECT_EQ(cfg.key[0], 'a');
  EXPECT_EQ(cfg.key[15], 's');
  EXPECT_EQ(cfg.iv[0], '1');
  EXPECT_EQ(cfg.iv[15], 'a');
  EXPECT_THROW(block_from_text("short"), Error);
}

TEST(EncryptDataset, FixedModeIsDeterministicAndKeepsLabels) {
  ImageSet s = test::random_images(20, 3);
  // Duplicate image 0 at position 1.
  std::vector<std::uint8_t> px(s.pixels().begin(), s.pixels().end());
  std::copy_n(px.begin(), kImageBytes, px.begin() + kImageBytes);
  s = ImageSet(px, std::vector<Label>(s.labels().begin(), s.labels().end()), Provenance::plaintext);

  const ImageSet a = encrypt_dataset(s, CipherConfig{});
  const ImageSet b = encrypt_dataset(s, CipherConfig{});
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.provenance(), Provenance::encrypted_fixed);
  EXPECT_TRUE(std::equal(a.labels().begin(), a.labels().end(), s.labels().begin()));
  EXPECT_TRUE(std::equal(a.image(0).begin(), a.image(0).end(), a.image(1).begin()));
  EXPECT_FALSE(std::equal(a.image(0).begin(), a.image(0).end(), s.image(0).begin()));
  EXPECT_EQ(decrypt_dataset(a, CipherConfig{}), s);
}

TEST(EncryptDataset, PerSampleModeSeparatesIdenticalImages) {
  const std::vector<std::uint8_t> px(2 * kImageBytes, 17);
  const ImageSet s(px, {1, 1}, Provenance::plaintext);
  CipherConfig cfg;
  cfg.mode = CipherMode::per_sample;
  cfg.per_sample_seed = 7;
  const ImageSet e = encrypt_dataset(s, cfg);
  EXPECT_EQ(e.provenance(), Provenance::encrypted_per_sample);
  EXPECT_FALSE(std::equal(e.image(0).begin(), e.image(0).end(), e.image(1).begin()));
  EXPECT_EQ(encrypt_dataset(s, cfg), e);
  EXPECT_EQ(decrypt_dataset(e, cfg), s);
}

TEST(EncryptDataset, PerSampleKeyStreamHasNoCollisions) {
  std::unordered_set<std::string> seen;
  for (std::uint64_t i = 0; i < 70000; ++i) {
    const auto [key, iv] = per_sample_key(7, i);
    std::string k(key.begin(), key.end());
    k.append(iv.begin(), iv.end());
    ASSERT_TRUE(seen.insert(k).second) << "collision at index " << i;
  }
  EXPECT_NE(per_sample_key(7, 0).key, per_sample_key(8, 0).key);
}

TEST(EncryptDataset, ReencryptionIsPreconditionError) {
  const ImageSet e = encrypt_dataset(test::random_images(2, 1), CipherConfig{});
  try {
    encrypt_dataset(e, CipherConfig{});
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::precondition);
  }
}

TEST(EncryptDataset, InjectiveOnDistinctInputs) {
  const ImageSet s = test::random_images(10000, 12);
  const ImageSet e = encrypt_dataset(s, CipherConfig{});
  std::unordered_set<std::string> ct;
  for (std::size_t i = 0; i < e.count(); ++i) ct.emplace(e.image(i).begin(), e.image(i).end());
  EXPECT_EQ(ct.size(), 10000u);
}

TEST(EncryptDataset, CommutesWithPermutation) {
  const ImageSet s = test::random_images(64, 4);
  const auto perm = seeded_permutation(s.count(), 123);
  const CipherConfig cfg;
  EXPECT_EQ(encrypt_dataset(s.subset(perm), cfg), encrypt_dataset(s, cfg).subset(perm));
}

TEST(EncryptDataset, MnistTrainSetShape) {
  if (!test::have_mnist()) GTEST_SKIP();
  const auto files = locate_mnist(test::mnist_dir());
  const ImageSet train = load_idx(files.train_images, files.train_labels);
  const ImageSet e = encrypt_dataset(train, CipherConfig{});
  EXPECT_EQ(e.count(), 60000u);
  EXPECT_EQ(e.pixels().size(), 60000u * 784u);
  // The first block is all-zero pixels for almost every digit, so its
  // ciphertext is the same constant: the leak a fixed IV leaves.
  std::map<std::string, int> first_blocks;
  for (std::size_t i = 0; i < 1000; ++i) first_blocks[std::string(e.image(i).begin(), e.image(i).begin() + 16)]++;
  EXPECT_GT(std::max_element(first_blocks.begin(), first_blocks.end(),
                             [](auto& a, auto& b) { return a.second < b.second; })->second,
            990);
}

TEST(Container, RoundTripAndHeaderLayout) {
  test::TempDir dir("ecpd");
  CipherConfig cfg;
  cfg.mode = CipherMode::per_sample;
  cfg.per_sample_seed = 0x0102030405060708ULL;
  const ImageSet e = encrypt_dataset(test::random_images(5, 2), cfg);
  write_container(dir / "x.ecpd", e, std::uint8_t(cfg.mode), cfg.per_sample_seed);
  const Container c = read_container(dir / "x.ecpd");
  EXPECT_EQ(c.set, e);
  EXPECT_EQ(c.header.count, 5u);
  EXPECT_EQ(c.header.mode, 1u);
  EXPECT_EQ(c.header.per_sample_seed, cfg.per_sample_seed);

  std::ifstream in(dir / "x.ecpd", std::ios::binary);
  std::vector<unsigned char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  ASSERT_EQ(raw.size(), kContainerHeaderBytes + 5 * 785);
  EXPECT_EQ(std::string(raw.begin(), raw.begin() + 4), "ECPD");
  EXPECT_EQ(raw[4], 1);   // version, little-endian
  EXPECT_EQ(raw[8], 5);   // count
  EXPECT_EQ(raw[13], 2);  // provenance encrypted_per_sample
  EXPECT_EQ(raw[16], 0x08);
  EXPECT_EQ(raw[23], 0x01);
  EXPECT_EQ(raw.back(), e.label(4));
}

TEST(Container, RejectsGarbage) {
  test::TempDir dir("ecpd-bad");
  {
    std::ofstream out(dir / "bad", std::ios::binary);
    out << "NOPE0000000000000000000000000";
  }
  EXPECT_THROW(read_container(dir / "bad"), Error);
  EXPECT_THROW(read_container(dir / "missing"), Error);
}

}  // namespace
}  // namespace ecp
