#include "ecp/lemma_mc.hpp"

#include <cmath>
#include <sstream>

#include "ecp/conformal.hpp"
#include "ecp/errors.hpp"

namespace ecp {

double ScoreSampler::operator()(Rng& rng) const {
  switch (kind) {
    case Kind::uniform: return rng.uniform();
    case Kind::exponential: return rng.exponential(param);
    case Kind::pareto: return rng.pareto(param);
    case Kind::constant: return param;
  }
  return 0.0;
}

std::string ScoreSampler::name() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::uniform: os << "uniform"; break;
    case Kind::exponential: os << "exponential(" << param << ")"; break;
    case Kind::pareto: os << "pareto(" << param << ")"; break;
    case Kind::constant: os << "constant(" << param << ")"; break;
  }
  return os.str();
}

McResult mc_validate_lemma1(std::size_t n, double epsilon, std::size_t trials, const ScoreSampler& dist,
                            std::uint64_t seed) {
  if (n == 0 || trials == 0) throw Error(ErrorKind::config, "n and trials must be positive");
  Rng rng(seed);
  std::vector<double> l(n + 1);
  std::size_t hits = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    for (auto& v : l) v = dist(rng);
    const double last = l[n];
    std::size_t u = 0;
    for (double v : l) u += v >= last;
    hits += double(u) / double(n + 1) > epsilon;
  }
  McResult r;
  r.trials = trials;
  r.frequency = double(hits) / double(trials);
  r.sigma = std::sqrt(epsilon * (1.0 - epsilon) / double(trials));
  r.bound = 1.0 - epsilon - 3.0 * r.sigma;
  r.passed = r.frequency >= r.bound;
  return r;
}

McResult mc_validate_lemma2(std::size_t n, double alpha, std::size_t trials, const ScoreSampler& dist,
                            std::uint64_t seed) {
  if (n == 0 || trials == 0) throw Error(ErrorKind::config, "n and trials must be positive");
  const double factor = e_factor(alpha, n);
  Rng rng(seed);
  std::size_t hits = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += dist(rng);
    const double last = dist(rng);
    hits += last >= factor * (sum / double(n));
  }
  McResult r;
  r.trials = trials;
  r.frequency = double(hits) / double(trials);
  r.sigma = std::sqrt(alpha * (1.0 - alpha) / double(trials));
  r.bound = alpha + 3.0 * r.sigma;
  r.passed = r.frequency <= r.bound;
  return r;
}

}  // namespace ecp
