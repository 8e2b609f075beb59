#include "egoloc/action_codebook.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "egoloc/errors.hpp"

namespace egoloc {

namespace {

int nearest(const Eigen::MatrixXd& centroids, const Eigen::Ref<const Eigen::VectorXd>& x,
            double* best_sq = nullptr) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int j = 0; j < centroids.cols(); ++j) {
    const double d = (centroids.col(j) - x).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = j;
    }
  }
  if (best_sq) *best_sq = best_d;
  return best;
}

int count_distinct_columns(const Eigen::MatrixXd& points) {
  std::vector<int> order(points.cols());
  std::iota(order.begin(), order.end(), 0);
  auto less = [&](int a, int b) {
    for (int r = 0; r < points.rows(); ++r) {
      if (points(r, a) != points(r, b)) return points(r, a) < points(r, b);
    }
    return false;
  };
  std::sort(order.begin(), order.end(), less);
  int distinct = order.empty() ? 0 : 1;
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (less(order[i - 1], order[i])) ++distinct;
  }
  return distinct;
}

// D^2-weighted seeding (k-means++).
Eigen::MatrixXd seed_centroids(const Eigen::MatrixXd& points, int k, std::mt19937_64& rng) {
  const int n = static_cast<int>(points.cols());
  Eigen::MatrixXd centroids(points.rows(), k);
  std::uniform_int_distribution<int> first(0, n - 1);
  centroids.col(0) = points.col(first(rng));

  std::vector<double> d2(n);
  for (int i = 0; i < n; ++i) d2[i] = (points.col(i) - centroids.col(0)).squaredNorm();

  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (int c = 1; c < k; ++c) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    const double target = uniform(rng) * total;
    int pick = -1;
    double running = 0.0;
    for (int i = 0; i < n; ++i) {
      if (d2[i] <= 0.0) continue;
      running += d2[i];
      pick = i;
      if (running > target) break;
    }
    centroids.col(c) = points.col(pick);
    for (int i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], (points.col(i) - centroids.col(c)).squaredNorm());
    }
  }
  return centroids;
}

void require_distribution(const Eigen::VectorXd& p, const char* name) {
  if (p.size() == 0) throw InvalidArgument(std::string(name) + ": empty score vector");
  for (int i = 0; i < p.size(); ++i) {
    if (!std::isfinite(p[i]) || p[i] < 0.0) {
      throw InvalidArgument(std::string(name) + ": scores must be finite and non-negative");
    }
  }
  if (std::abs(p.sum() - 1.0) > 1e-6) {
    throw InvalidArgument(std::string(name) + ": scores must sum to 1");
  }
}

}  // namespace

ActionCodebook::ActionCodebook(Eigen::MatrixXd centroids, std::uint64_t seed)
    : centroids_(std::move(centroids)), seed_(seed) {
  if (centroids_.cols() < 1 || centroids_.rows() < 1) {
    throw InvalidArgument("ActionCodebook: needs at least one centroid");
  }
  if (!centroids_.allFinite()) {
    throw InvalidArgument("ActionCodebook: non-finite centroid");
  }
  for (int i = 0; i < centroids_.cols(); ++i) {
    for (int j = i + 1; j < centroids_.cols(); ++j) {
      if (centroids_.col(i) == centroids_.col(j)) {
        throw InvalidArgument("ActionCodebook: centroids " + std::to_string(i) + " and " +
                              std::to_string(j) + " coincide");
      }
    }
  }
}

ActionLabel ActionCodebook::assign(const Eigen::VectorXd& clip_vector) const {
  if (clip_vector.size() != centroids_.rows()) {
    throw InvalidArgument("ActionCodebook::assign: dimension mismatch");
  }
  return {nearest(centroids_, clip_vector)};
}

ActionLabel ActionCodebook::assign(const PoseSequence& clip) const {
  return assign(pose_clip_vector(clip));
}

Eigen::VectorXd ActionCodebook::label_scores(const PoseSequence& clip,
                                             double temperature) const {
  if (!(temperature > 0.0)) {
    throw InvalidArgument("label_scores: temperature must be positive");
  }
  const Eigen::VectorXd x = pose_clip_vector(clip);
  if (x.size() != centroids_.rows()) {
    throw InvalidArgument("label_scores: dimension mismatch");
  }
  const double points_per_vector = static_cast<double>(centroids_.rows()) / 3.0;
  Eigen::VectorXd d(k());
  for (int j = 0; j < k(); ++j) {
    d[j] = std::sqrt((centroids_.col(j) - x).squaredNorm() / points_per_vector);
  }
  const double d_min = d.minCoeff();
  Eigen::VectorXd p = (-(d.array() - d_min) / temperature).exp().matrix();
  return p / p.sum();
}

double ActionCodebook::centroid_distance(int i, int j) const {
  const double points_per_vector = static_cast<double>(centroids_.rows()) / 3.0;
  return std::sqrt((centroids_.col(i) - centroids_.col(j)).squaredNorm() / points_per_vector);
}

KMeansFit fit_codebook_vectors(const Eigen::MatrixXd& points, const KMeansOptions& options) {
  const int n = static_cast<int>(points.cols());
  const int k = options.k;
  if (k < 1) throw InvalidArgument("fit_codebook: k must be >= 1");
  if (n < k) {
    throw InvalidArgument("fit_codebook: " + std::to_string(n) + " clips for k = " +
                          std::to_string(k));
  }
  if (!points.allFinite()) throw InvalidArgument("fit_codebook: non-finite clip");
  if (count_distinct_columns(points) < k) {
    throw InvalidArgument("fit_codebook: fewer distinct clips than k = " + std::to_string(k));
  }
  if (options.max_iterations < 1) {
    throw InvalidArgument("fit_codebook: max_iterations must be >= 1");
  }

  std::mt19937_64 rng(options.seed);
  Eigen::MatrixXd centroids = seed_centroids(points, k, rng);

  std::vector<int> labels(n, -1);
  std::vector<double> sse_history;
  bool converged = false;
  int iterations = 0;

  for (int it = 0; it < options.max_iterations; ++it) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      const int j = nearest(centroids, points.col(i));
      if (j != labels[i]) {
        labels[i] = j;
        changed = true;
      }
    }
    if (!changed) {
      converged = true;
      break;
    }
    ++iterations;

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(points.rows(), k);
    std::vector<int> counts(k, 0);
    for (int i = 0; i < n; ++i) {
      sums.col(labels[i]) += points.col(i);
      ++counts[labels[i]];
    }
    std::vector<int> empty;
    for (int j = 0; j < k; ++j) {
      if (counts[j] > 0) {
        centroids.col(j) = sums.col(j) / static_cast<double>(counts[j]);
      } else {
        empty.push_back(j);
      }
    }

    std::vector<double> cost(n);
    for (int i = 0; i < n; ++i) cost[i] = (points.col(i) - centroids.col(labels[i])).squaredNorm();
    sse_history.push_back(std::accumulate(cost.begin(), cost.end(), 0.0));

    // Empty clusters move to the worst-served points. Members are unchanged,
    // so the recorded SSE still describes the current assignment.
    std::vector<int> reseeded;
    for (const int j : empty) {
      int far = -1;
      for (int i = 0; i < n; ++i) {
        const bool taken = std::any_of(reseeded.begin(), reseeded.end(), [&](int r) {
          return points.col(r) == points.col(i);
        });
        if (taken) continue;
        if (far < 0 || cost[i] > cost[far]) far = i;
      }
      centroids.col(j) = points.col(far);
      reseeded.push_back(far);
    }
  }

  return {ActionCodebook(std::move(centroids), options.seed), std::move(sse_history),
          iterations, converged};
}

KMeansFit fit_codebook_detailed(std::span<const PoseSequence> clips,
                                const KMeansOptions& options) {
  Eigen::MatrixXd points(static_cast<Eigen::Index>(kClipVectorSize),
                         static_cast<Eigen::Index>(clips.size()));
  for (std::size_t i = 0; i < clips.size(); ++i) {
    points.col(static_cast<Eigen::Index>(i)) = pose_clip_vector(clips[i]);
  }
  return fit_codebook_vectors(points, options);
}

ActionCodebook fit_codebook(std::span<const PoseSequence> clips, int k, std::uint64_t seed) {
  KMeansOptions options;
  options.k = k;
  options.seed = seed;
  return fit_codebook_detailed(clips, options).codebook;
}

int argmax_lowest(const Eigen::VectorXd& v) {
  int best = 0;
  for (int i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

double clamped_cross_entropy(const Eigen::VectorXd& scores, int index) {
  return -std::log(std::max(scores[index], kLogClamp));
}

ActionAgreement action_agreement(const Eigen::VectorXd& ego_scores,
                                 const Eigen::VectorXd& third_scores) {
  require_distribution(ego_scores, "action_agreement(ego)");
  require_distribution(third_scores, "action_agreement(third)");
  if (ego_scores.size() != third_scores.size()) {
    throw InvalidArgument("action_agreement: score vectors differ in length");
  }
  ActionAgreement out;
  out.ego_label = {argmax_lowest(ego_scores)};
  out.third_label = {argmax_lowest(third_scores)};
  out.ego_cross_entropy = clamped_cross_entropy(ego_scores, out.third_label.index);
  out.third_cross_entropy = clamped_cross_entropy(third_scores, out.ego_label.index);
  out.agreement = out.ego_label == out.third_label ? 1.0 : 0.0;
  return out;
}

ActionAgreement action_agreement(const Eigen::VectorXd& ego_scores,
                                 const Eigen::VectorXd& third_scores,
                                 const ActionCodebook& codebook, double temperature) {
  ActionAgreement out = action_agreement(ego_scores, third_scores);
  if (ego_scores.size() != codebook.k()) {
    throw InvalidArgument("action_agreement: score length does not match codebook");
  }
  if (!(out.ego_label == out.third_label)) {
    out.agreement = std::exp(
        -codebook.centroid_distance(out.ego_label.index, out.third_label.index) / temperature);
  }
  return out;
}

}  // namespace egoloc
