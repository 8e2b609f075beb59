#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <vector>

#include "egoloc/skeleton.hpp"

namespace egoloc {

inline constexpr int kDefaultCodebookSize = 400;
inline constexpr int kDefaultMaxIterations = 300;
inline constexpr double kDefaultLabelTemperature = 0.1;  // meters, RMS joint distance
inline constexpr double kLogClamp = 1e-12;

struct ActionLabel {
  int index = 0;
  friend bool operator==(ActionLabel, ActionLabel) = default;
};

/// K centroids in pose-clip space, one 456-vector (meters) per column.
class ActionCodebook {
 public:
  /// `centroids` is dim x K. Throws InvalidArgument if empty, non-finite, or if
  /// two centroids coincide. dim is 456 for pose clips; other widths are
  /// accepted for raw-vector use.
  ActionCodebook(Eigen::MatrixXd centroids, std::uint64_t seed = 0);

  int k() const { return static_cast<int>(centroids_.cols()); }
  int dim() const { return static_cast<int>(centroids_.rows()); }
  std::uint64_t seed() const { return seed_; }
  const Eigen::MatrixXd& centroids() const { return centroids_; }
  auto centroid(int j) const { return centroids_.col(j); }

  /// Nearest centroid by Euclidean distance on the clip vector; ties go to the
  /// lowest index.
  ActionLabel assign(const Eigen::VectorXd& clip_vector) const;
  ActionLabel assign(const PoseSequence& clip) const;

  /// softmax(-d_j / temperature), d_j the RMS per-joint distance to centroid j
  /// (Euclidean clip distance / sqrt(8 * 19)). Argmax matches assign().
  Eigen::VectorXd label_scores(const PoseSequence& clip,
                               double temperature = kDefaultLabelTemperature) const;

  /// RMS per-joint distance between centroids i and j.
  double centroid_distance(int i, int j) const;

 private:
  Eigen::MatrixXd centroids_;
  std::uint64_t seed_;
};

struct KMeansOptions {
  int k = kDefaultCodebookSize;
  std::uint64_t seed = 0;
  int max_iterations = kDefaultMaxIterations;
};

struct KMeansFit {
  ActionCodebook codebook;
  /// Within-cluster SSE after each Lloyd iteration (assignment + update).
  std::vector<double> sse_history;
  int iterations = 0;
  bool converged = false;
};

/// Lloyd's algorithm on pose-clip vectors with D^2-weighted seeding from a
/// seeded RNG. Stops when assignments stop changing or after max_iterations.
/// A cluster that empties is re-seeded at the point farthest from its
/// assigned centroid. Throws InvalidArgument when there are fewer distinct
/// clips than k, or k < 1.
KMeansFit fit_codebook_detailed(std::span<const PoseSequence> clips,
                                const KMeansOptions& options);
ActionCodebook fit_codebook(std::span<const PoseSequence> clips, int k,
                            std::uint64_t seed);
/// Same algorithm on raw vectors, one point per column.
KMeansFit fit_codebook_vectors(const Eigen::MatrixXd& points, const KMeansOptions& options);

struct ActionAgreement {
  /// -log p_ego[argmax p_third], clamped.
  double ego_cross_entropy = 0.0;
  /// -log p_third[argmax p_ego], clamped.
  double third_cross_entropy = 0.0;
  ActionLabel ego_label;
  ActionLabel third_label;
  /// 1 when the labels match; otherwise exp(-d / temperature) with d the RMS
  /// distance between the two centroids (0 when no codebook is given).
  double agreement = 1.0;
};

/// Cross-entropy of each score vector against the other's argmax as a one-hot
/// indicator. Both vectors must be non-negative and sum to 1 within 1e-6.
ActionAgreement action_agreement(const Eigen::VectorXd& ego_scores,
                                 const Eigen::VectorXd& third_scores);
ActionAgreement action_agreement(const Eigen::VectorXd& ego_scores,
                                 const Eigen::VectorXd& third_scores,
                                 const ActionCodebook& codebook,
                                 double temperature = kDefaultLabelTemperature);

/// -log(max(p[index], 1e-12)).
double clamped_cross_entropy(const Eigen::VectorXd& scores, int index);

/// Lowest index among the maxima.
int argmax_lowest(const Eigen::VectorXd& v);

}  // namespace egoloc
