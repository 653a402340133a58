#include "ecp/tsne.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ecp/errors.hpp"
#include "ecp/rng.hpp"

namespace ecp {

Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& data) {
  const Eigen::VectorXd norms = data.rowwise().squaredNorm();
  Eigen::MatrixXd d = -2.0 * data * data.transpose();
  d.colwise() += norms;
  d.rowwise() += norms.transpose();
  d = d.cwiseMax(0.0);
  d.diagonal().setZero();
  return d;
}

Eigen::MatrixXd joint_probabilities(const Eigen::MatrixXd& sq_dist, double perplexity, double tol) {
  const Eigen::Index n = sq_dist.rows();
  const double target = std::log(perplexity);
  Eigen::MatrixXd p(n, n);
  Eigen::ArrayXd d(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    // Distances are shifted by the nearest neighbour so exp() cannot
    // underflow the whole row; the shift cancels in the normalization.
    double dmin = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) dmin = std::min(dmin, sq_dist(j, i));
    d = sq_dist.col(i).array() - dmin;
    d(i) = 0.0;
    double beta = 1.0, lo = 0.0, hi = std::numeric_limits<double>::infinity();
    auto col = p.col(i).array();
    for (int iter = 0; iter < 200; ++iter) {
      col = (-beta * d).exp();
      col(i) = 0.0;
      const double sum = col.sum();
      const double weighted = (col * d).sum();
      // H = log(sum) + beta * E[d]
      const double entropy = std::log(sum) + beta * weighted / sum;
      col /= sum;
      const double diff = entropy - target;
      if (std::abs(diff) < tol) break;
      if (diff > 0.0) {
        lo = beta;
        beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
      } else {
        hi = beta;
        beta = 0.5 * (beta + lo);
      }
    }
  }
  // Column i held P_{j|i}; symmetrize in place.
  const double scale = 1.0 / (2.0 * double(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    p(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = std::max((p(i, j) + p(j, i)) * scale, 1e-12);
      p(i, j) = v;
      p(j, i) = v;
    }
  }
  return p;
}

namespace {

// sum_ij p_ij log p_ij over i != j; constant during optimization.
double p_entropy(const Eigen::MatrixXd& p) {
  double ent = 0.0;
  for (Eigen::Index i = 0; i < p.cols(); ++i) {
    const auto c = p.col(i).array();
    ent += (c * c.max(1e-300).log()).sum();
  }
  return ent;
}

double kl_with_entropy(const Eigen::MatrixXd& p, const Eigen::ArrayXd& yx, const Eigen::ArrayXd& yy, double ent) {
  const Eigen::Index n = yx.size();
  double z = 0.0, cross = 0.0;
  Eigen::ArrayXd num(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    num = 1.0 / (1.0 + (yx - yx(i)).square() + (yy - yy(i)).square());
    z += num.sum() - 1.0;
    cross += (p.col(i).array() * num.log()).sum();
  }
  // sum p log(p / q) with q = num / z and sum p = 1
  return ent - cross + std::log(z);
}

}  // namespace

double kl_divergence(const Eigen::MatrixXd& p, const Eigen::MatrixX2d& y) {
  return kl_with_entropy(p, y.col(0).array(), y.col(1).array(), p_entropy(p));
}

Eigen::MatrixXd image_rows(const ImageSet& set) {
  Eigen::MatrixXd out(Eigen::Index(set.count()), Eigen::Index(kImageBytes));
  for (std::size_t i = 0; i < set.count(); ++i) {
    const auto img = set.image(i);
    for (std::size_t k = 0; k < kImageBytes; ++k) out(Eigen::Index(i), Eigen::Index(k)) = double(img[k]) / 255.0;
  }
  return out;
}

Embedding2D tsne(const Eigen::MatrixXd& data, std::span<const Label> labels, const TsneConfig& cfg) {
  const Eigen::Index n = data.rows();
  if (std::size_t(n) != labels.size()) throw Error(ErrorKind::consistency, "one label per row required");
  if (!(cfg.perplexity > 0.0) || double(n) < 3.0 * cfg.perplexity) {
    throw Error(ErrorKind::config, "perplexity " + std::to_string(cfg.perplexity) + " infeasible for n = " +
                                       std::to_string(n) + " (need n >= 3 * perplexity)");
  }

  // Canonical order: lexicographic on row contents, ties by index.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&data](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index k = 0; k < data.cols(); ++k) {
      if (data(a, k) != data(b, k)) return data(a, k) < data(b, k);
    }
    return false;
  });
  Eigen::MatrixXd sorted(n, data.cols());
  for (Eigen::Index i = 0; i < n; ++i) sorted.row(i) = data.row(order[std::size_t(i)]);

  Eigen::MatrixXd p;
  {
    Eigen::MatrixXd d2 = squared_distances(sorted);
    sorted.resize(0, 0);
    p = joint_probabilities(d2, cfg.perplexity, cfg.entropy_tolerance);
  }
  const double ent = p_entropy(p);

  Rng rng(cfg.seed);
  Eigen::ArrayXd yx(n), yy(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    yx(i) = 1e-4 * rng.normal();
    yy(i) = 1e-4 * rng.normal();
  }
  Eigen::ArrayXXd update = Eigen::ArrayXXd::Zero(n, 2);
  Eigen::ArrayXXd gains = Eigen::ArrayXXd::Ones(n, 2);
  Eigen::ArrayXXd grad(n, 2);
  Eigen::ArrayXd num(n), coef(n);

  Embedding2D out;
  out.perplexity = cfg.perplexity;
  out.iterations = cfg.iterations;
  out.seed = cfg.seed;

  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    const double exaggeration = it < cfg.exaggeration_iterations ? cfg.early_exaggeration : 1.0;
    const double momentum = it < cfg.momentum_switch ? cfg.initial_momentum : cfg.final_momentum;

    // Student-t normalizer over ordered pairs i != j.
    double z = 0.0;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      const Eigen::Index m = n - i - 1;
      z += 2.0 * (1.0 / (1.0 + (yx.tail(m) - yx(i)).square() + (yy.tail(m) - yy(i)).square())).sum();
    }
    const double inv_z = 1.0 / z;

    // dC/dy_i = 4 sum_j (p_ij - q_ij) (1 + |y_i - y_j|^2)^-1 (y_i - y_j)
    for (Eigen::Index i = 0; i < n; ++i) {
      num = 1.0 / (1.0 + (yx - yx(i)).square() + (yy - yy(i)).square());
      coef = (exaggeration * p.col(i).array() - num * inv_z) * num;
      coef(i) = 0.0;
      grad(i, 0) = 4.0 * (coef * (yx(i) - yx)).sum();
      grad(i, 1) = 4.0 * (coef * (yy(i) - yy)).sum();
    }
    grad = grad.max(-cfg.gradient_clip).min(cfg.gradient_clip);

    for (Eigen::Index i = 0; i < n; ++i) {
      for (int d = 0; d < 2; ++d) {
        const bool same_sign = (grad(i, d) > 0.0) == (update(i, d) > 0.0);
        gains(i, d) = same_sign ? gains(i, d) * 0.8 : gains(i, d) + 0.2;
        gains(i, d) = std::max(gains(i, d), 0.01);
        update(i, d) = momentum * update(i, d) - cfg.learning_rate * gains(i, d) * grad(i, d);
      }
    }
    yx += update.col(0);
    yy += update.col(1);
    yx -= yx.mean();
    yy -= yy.mean();

    const bool in_tail = it + cfg.kl_tail >= cfg.iterations;
    if (in_tail || (cfg.kl_every && (it + 1) % cfg.kl_every == 0)) {
      out.kl_trace.emplace_back(it + 1, kl_with_entropy(p, yx, yy, ent));
    }
  }

  out.points.resize(n, 2);
  out.labels.resize(std::size_t(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    out.points(order[std::size_t(i)], 0) = yx(i);
    out.points(order[std::size_t(i)], 1) = yy(i);
  }
  std::copy(labels.begin(), labels.end(), out.labels.begin());
  return out;
}

double intra_inter_ratio(const Eigen::MatrixX2d& points, std::span<const Label> labels) {
  double intra = 0.0, inter = 0.0;
  std::size_t n_intra = 0, n_inter = 0;
  const Eigen::Index n = points.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = (points.row(i) - points.row(j)).norm();
      if (labels[std::size_t(i)] == labels[std::size_t(j)]) {
        intra += d;
        ++n_intra;
      } else {
        inter += d;
        ++n_inter;
      }
    }
  }
  if (n_intra == 0 || n_inter == 0) throw Error(ErrorKind::precondition, "need both intra- and inter-class pairs");
  return (intra / double(n_intra)) / (inter / double(n_inter));
}

}  // namespace ecp
