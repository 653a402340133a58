#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "ecp/image_set.hpp"

namespace ecp {

struct TsneConfig {
  double perplexity = 30.0;
  std::size_t iterations = 1000;
  double learning_rate = 200.0;
  std::uint64_t seed = 2024;
  double early_exaggeration = 12.0;
  std::size_t exaggeration_iterations = 250;
  double initial_momentum = 0.5;
  double final_momentum = 0.8;
  std::size_t momentum_switch = 250;
  double entropy_tolerance = 1e-5;
  // KL is evaluated every kl_every iterations and on each of the final
  // kl_tail iterations.
  std::size_t kl_every = 50;
  std::size_t kl_tail = 100;
  double gradient_clip = 1e4;  // per-coordinate bound on the gradient
};

struct Embedding2D {
  Eigen::MatrixX2d points;  // one row per input row
  std::vector<Label> labels;
  double perplexity = 0.0;
  std::size_t iterations = 0;
  std::uint64_t seed = 0;
  // (iteration, KL(P || Q)) measured without exaggeration, after the update
  // of that iteration.
  std::vector<std::pair<std::size_t, double>> kl_trace;
};

// Squared Euclidean distances between rows.
Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& data);

// Symmetrized affinities (P_j|i + P_i|j) / 2n with per-row Gaussian
// bandwidths found by bisection on the entropy.
Eigen::MatrixXd joint_probabilities(const Eigen::MatrixXd& sq_dist, double perplexity, double tol = 1e-5);

double kl_divergence(const Eigen::MatrixXd& p, const Eigen::MatrixX2d& y);

// Exact t-SNE. Rows are processed in a canonical content order, so permuting
// the input rows permutes the output rows identically.
Embedding2D tsne(const Eigen::MatrixXd& data, std::span<const Label> labels, const TsneConfig& cfg = {});

// Rows of normalized images, one image per row.
Eigen::MatrixXd image_rows(const ImageSet& set);

// Mean embedded distance within classes over mean distance across classes.
// Values well below 1 mean class clusters; about 1 means no class structure.
double intra_inter_ratio(const Eigen::MatrixX2d& points, std::span<const Label> labels);

}  // namespace ecp
