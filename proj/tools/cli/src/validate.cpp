#include <chrono>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "ecp/aes.hpp"
#include "ecp/errors.hpp"
#include "ecp/gradient_check.hpp"
#include "ecp/lemma_mc.hpp"
#include "ecp/rng.hpp"

namespace ecp::cli {

namespace {

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

std::vector<std::uint8_t> unhex(std::string_view h) {
  std::vector<std::uint8_t> out;
  for (std::size_t i = 0; i + 1 < h.size(); i += 2) out.push_back(std::uint8_t(std::stoul(std::string(h.substr(i, 2)), nullptr, 16)));
  return out;
}

AesBlock block(std::string_view h) {
  AesBlock b{};
  const auto v = unhex(h);
  std::copy(v.begin(), v.end(), b.begin());
  return b;
}

SuiteResult aes_vectors(bool fault) {
  struct Vec {
    const char *key, *pt, *ct;
  };
  // FIPS-197 Appendix C.1 and Appendix B.
  static constexpr Vec kVecs[] = {
      {"000102030405060708090a0b0c0d0e0f", "00112233445566778899aabbccddeeff", "69c4e0d86a7b0430d8cdb78070b4c55a"},
      {"2b7e151628aed2a6abf7158809cf4f3c", "3243f6a8885a308d313198a2e0370734", "3925841d02dc09fbdc118597196a0b32"},
  };
  std::size_t ok = 0, total = 0;
  for (const auto& v : kVecs) {
    const Aes128 aes(block(v.key));
    AesBlock out = aes.encrypt_block(block(v.pt));
    if (fault) out[0] ^= 1;
    ok += out == block(v.ct);
    ok += aes.decrypt_block(block(v.ct)) == block(v.pt);
    total += 2;
  }
  // SP 800-38A F.2.1, CBC-AES128.
  const auto pt = unhex(
      "6bc1bee22e409f96e93d7e117393172aae2d8a571e03ac9c9eb76fac45af8e51"
      "30c81c46a35ce411e5fbc1191a0a52eff69f2445df4f9b17ad2b417be66c3710");
  const auto ct = unhex(
      "7649abac8119b246cee98e9b12e9197d5086cb9b507219ee95db113a917678b2"
      "73bed6b8e3c1743b7116e69e222295163ff1caa1681fac09120eca307586e1a7");
  const AesBlock key = block("2b7e151628aed2a6abf7158809cf4f3c");
  const AesBlock iv = block("000102030405060708090a0b0c0d0e0f");
  auto enc = aes128_cbc_encrypt(pt, key, iv);
  if (fault) enc.back() ^= 0x80;
  ok += enc == ct;
  ok += aes128_cbc_decrypt(ct, key, iv) == pt;
  total += 2;
  return {"aes-vectors", ok == total, std::to_string(ok) + "/" + std::to_string(total) + " reference vectors"};
}

SuiteResult cbc_roundtrip(std::size_t count, std::uint64_t seed, bool fault) {
  Rng rng(seed);
  std::size_t ok = 0;
  std::vector<std::uint8_t> pt(784);
  for (std::size_t i = 0; i < count; ++i) {
    AesBlock key, iv;
    for (auto& b : key) b = std::uint8_t(rng.below(256));
    for (auto& b : iv) b = std::uint8_t(rng.below(256));
    for (auto& b : pt) b = std::uint8_t(rng.below(256));
    auto ct = aes128_cbc_encrypt(pt, key, iv);
    if (fault) ct[rng.below(ct.size())] ^= 1;
    ok += ct.size() == pt.size() && aes128_cbc_decrypt(ct, key, iv) == pt;
  }
  return {"cbc-roundtrip", ok == count, std::to_string(ok) + "/" + std::to_string(count) + " random 784-byte inputs"};
}

std::vector<SuiteResult> lemma_suites(std::size_t trials, std::uint64_t seed) {
  std::vector<SuiteResult> out;
  const ScoreSampler samplers[] = {ScoreSampler::uniform(), ScoreSampler::exponential(), ScoreSampler::pareto(1.5)};
  for (int lemma = 1; lemma <= 2; ++lemma) {
    bool all = true;
    std::ostringstream detail;
    detail.precision(4);
    std::uint64_t stream = 0;
    for (const auto& s : samplers) {
      for (std::size_t n : {50u, 500u, 5000u}) {
        const std::uint64_t sub = derive_seed(seed, 100 * std::uint64_t(lemma) + stream++);
        const McResult r = lemma == 1 ? mc_validate_lemma1(n, 0.4, trials, s, sub)
                                      : mc_validate_lemma2(n, 0.4, trials, s, sub);
        all = all && r.passed;
        detail << s.name() << "/n=" << n << ":" << r.frequency << (lemma == 1 ? ">=" : "<=") << r.bound
               << (r.passed ? "" : "!") << " ";
      }
    }
    out.push_back({lemma == 1 ? "lemma1-coverage" : "lemma2-violation", all, detail.str()});
  }
  return out;
}

SuiteResult gradients(std::uint64_t seed) {
  const NetworkSweepResult r = random_network_sweep(100, seed);
  std::ostringstream d;
  d << r.networks << " networks, max relative error " << r.max_relative_error << " (< 1e-4)";
  return {"gradient-check", r.max_relative_error < 1e-4, d.str()};
}

}  // namespace

int cmd_validate(const ValidateOptions& o, Io io) {
  if (o.trials == 0) throw Error(ErrorKind::config, "--trials must be positive");
  const bool cipher_fault = o.inject_fault == "cipher";
  if (!o.inject_fault.empty() && !cipher_fault) throw Error(ErrorKind::config, "unknown fault '" + o.inject_fault + "'");
  const std::filesystem::path out(o.out);
  std::filesystem::create_directories(out);

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<SuiteResult> results;
  results.push_back(aes_vectors(cipher_fault));
  results.push_back(cbc_roundtrip(10000, o.seed, cipher_fault));
  for (auto& r : lemma_suites(o.trials, o.seed)) results.push_back(std::move(r));
  results.push_back(gradients(o.seed));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::ostringstream report;
  bool all = true;
  for (const auto& r : results) {
    report << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
    all = all && r.passed;
  }
  io.out << report.str();

  Manifest m;
  m.set("command", "validate");
  m.set("out", o.out);
  m.set("trials", o.trials);
  m.set("seed", o.seed);
  if (!o.inject_fault.empty()) m.set("inject-fault", o.inject_fault);
  for (const auto& r : results) m.set("result." + r.name, r.passed ? "pass" : "fail");
  m.set("result.seconds", secs);
  {
    std::ofstream f(out / "validate_report.txt", std::ios::binary);
    f << report.str();
    if (!f) throw Error(ErrorKind::io, "cannot write validate_report.txt");
  }
  m.write(out / "validate_manifest.txt");
  return all ? 0 : 1;
}

}  // namespace ecp::cli
