#include "ecp/rng.hpp"

#include <cmath>
#include <numbers>

namespace ecp {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return mix64(mix64(seed) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound <= 1) return 0;
  // Reject the incomplete top bucket.
  const std::uint64_t limit = std::uint64_t(0) - (std::uint64_t(0) - bound) % bound;
  for (;;) {
    const std::uint64_t r = engine_();
    if (limit == 0 || r < limit) return r % bound;
  }
}

double Rng::uniform() { return double(engine_() >> 11) * 0x1.0p-53; }

double Rng::uniform_open_zero() { return (double(engine_() >> 11) + 1.0) * 0x1.0p-53; }

double Rng::exponential(double rate) { return -std::log(uniform_open_zero()) / rate; }

double Rng::pareto(double shape) { return std::pow(uniform_open_zero(), -1.0 / shape); }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform_open_zero();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

}  // namespace ecp
