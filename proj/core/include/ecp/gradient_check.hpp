#pragma once

#include <cstdint>
#include <span>

#include "ecp/mlp.hpp"

namespace ecp {

// One scalar parameter of a network.
struct ParamRef {
  std::size_t layer = 0;
  bool is_bias = false;
  Eigen::Index row = 0;
  Eigen::Index col = 0;  // ignored for biases
};

struct GradientCheckOptions {
  std::size_t samples = 256;  // parameters drawn per check (all of them if fewer exist)
  double step = 1e-5;
  std::uint64_t seed = 0;
};

struct GradientCheckResult {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  // Parameters whose +-step perturbation flips a ReLU; the loss is not
  // differentiable across the flip, so they are not compared.
  std::size_t skipped_kinks = 0;
};

// |a - n| / max(|a|, |n|, 1e-6); the floor keeps near-zero gradients from
// being compared on a purely relative scale.
double relative_error(double analytic, double numeric) noexcept;

double& param(BasicMlp<double>& model, const ParamRef& p);
double analytic_gradient(const BasicMlp<double>& model, const Eigen::VectorXd& x, std::size_t label,
                         const ParamRef& p);
// (L(theta + h) - L(theta - h)) / 2h
double central_difference(const BasicMlp<double>& model, const Eigen::VectorXd& x, std::size_t label,
                          const ParamRef& p, double step);

// Backprop vs central differences in double precision on a sampled subset of
// parameters. The float model is widened before checking.
GradientCheckResult gradient_check(const MlpModel& model, std::span<const float> x, std::size_t label,
                                   const GradientCheckOptions& opts = {});
GradientCheckResult gradient_check(const BasicMlp<double>& model, const Eigen::VectorXd& x,
                                   std::size_t label, const GradientCheckOptions& opts = {});

struct NetworkSweepResult {
  std::size_t networks = 0;
  double max_relative_error = 0.0;
  std::size_t worst_network = 0;
  std::size_t checked = 0;
};

// Gradient checks on `networks` random small MLPs (one or two hidden layers,
// random widths, random biases, random input and label), all seeded from
// `seed`.
NetworkSweepResult random_network_sweep(std::size_t networks, std::uint64_t seed,
                                        const GradientCheckOptions& opts = {});

}  // namespace ecp
