#pragma once

#include <cstdint>
#include <random>

namespace ecp {

// SplitMix64 finalizer; used to derive independent subseeds from a
// (seed, stream) pair so that parallel and serial consumers agree.
std::uint64_t mix64(std::uint64_t x) noexcept;
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

// Portable random source. std::mt19937_64 has a standardized output
// sequence; the distributions below are implemented here because the
// standard library ones are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform integer in [0, bound), unbiased (rejection sampling).
  std::uint64_t below(std::uint64_t bound);

  // Uniform real in [0, 1) with 53 random bits.
  double uniform();
  // Uniform real in (0, 1]; safe to take the log of.
  double uniform_open_zero();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double exponential(double rate = 1.0);
  // Pareto (type I) with scale 1: support [1, inf), tail index `shape`.
  double pareto(double shape);
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ecp
