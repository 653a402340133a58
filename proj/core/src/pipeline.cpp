#include "ecp/pipeline.hpp"

#include "ecp/errors.hpp"
#include "ecp/idx.hpp"
#include "ecp/rng.hpp"

namespace ecp {

std::string_view to_string(Regime r) noexcept {
  switch (r) {
    case Regime::plaintext: return "plaintext";
    case Regime::fixed: return "fixed";
    case Regime::per_sample: return "per-sample";
  }
  return "?";
}

Regime parse_regime(std::string_view s) {
  if (s == "plaintext" || s == "plain") return Regime::plaintext;
  if (s == "fixed") return Regime::fixed;
  if (s == "per-sample" || s == "per_sample") return Regime::per_sample;
  throw Error(ErrorKind::config, "unknown data regime '" + std::string(s) + "'");
}

DataPair load_mnist(const std::filesystem::path& dir) {
  const MnistFiles f = locate_mnist(dir);
  return {load_idx(f.train_images, f.train_labels), load_idx(f.test_images, f.test_labels)};
}

std::uint64_t per_sample_stream_seed(std::uint64_t seed, bool test_set) { return derive_seed(seed, test_set ? 1 : 0); }

ImageSet apply_regime(const ImageSet& set, Regime regime, const CipherConfig& base, std::uint64_t per_sample_seed,
                      bool test_set) {
  if (regime == Regime::plaintext) return set;
  CipherConfig cfg = base;
  if (regime == Regime::per_sample) {
    cfg.mode = CipherMode::per_sample;
    cfg.per_sample_seed = per_sample_stream_seed(per_sample_seed, test_set);
  } else {
    cfg.mode = CipherMode::fixed;
  }
  return encrypt_dataset(set, cfg);
}

DataPair make_regime(const DataPair& plain, Regime regime, const CipherConfig& base, std::uint64_t per_sample_seed) {
  return {apply_regime(plain.train, regime, base, per_sample_seed, false),
          apply_regime(plain.test, regime, base, per_sample_seed, true)};
}

}  // namespace ecp
