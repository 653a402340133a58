#pragma once

#include <cstdint>
#include <string>

#include "ecp/rng.hpp"

namespace ecp {

// iid score generators for the Monte Carlo checks of the two threshold
// rules. iid draws are exchangeable.
struct ScoreSampler {
  enum class Kind { uniform, exponential, pareto, constant };
  Kind kind = Kind::uniform;
  double param = 1.0;  // rate, Pareto tail index, or the constant value

  static ScoreSampler uniform() { return {Kind::uniform, 1.0}; }
  static ScoreSampler exponential(double rate = 1.0) { return {Kind::exponential, rate}; }
  static ScoreSampler pareto(double shape) { return {Kind::pareto, shape}; }
  static ScoreSampler constant(double value) { return {Kind::constant, value}; }

  double operator()(Rng& rng) const;
  std::string name() const;
};

struct McResult {
  double frequency = 0.0;  // observed event rate
  double sigma = 0.0;      // binomial standard error at the nominal rate
  double bound = 0.0;      // acceptance limit, nominal -/+ 3 sigma
  std::size_t trials = 0;
  bool passed = false;
};

// Rate of U/(n+1) > epsilon, U = #{i <= n+1 : L_i >= L_{n+1}}. Passes when the
// rate is at least 1 - epsilon - 3 sigma.
McResult mc_validate_lemma1(std::size_t n, double epsilon, std::size_t trials, const ScoreSampler& dist,
                            std::uint64_t seed = 2024);

// Rate of L_{n+1} >= e_factor(alpha, n) * mean(L_1..L_n). Passes when the
// rate is at most alpha + 3 sigma.
McResult mc_validate_lemma2(std::size_t n, double alpha, std::size_t trials, const ScoreSampler& dist,
                            std::uint64_t seed = 2024);

}  // namespace ecp
