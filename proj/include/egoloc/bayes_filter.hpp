#pragma once

#include <Eigen/Core>

#include <span>
#include <vector>

namespace egoloc {

/// Free parameters of the identity filter.
struct FilterParams {
  double alpha = 0.05;   // mixing toward uniform per predict step
  double beta = 0.7;     // velocity memory: v <- beta v + (1 - beta) diff
  double sigma_p = 0.5;  // position gate, plane units

  /// Throws ValidationError naming the offending field.
  void validate() const;
};

/// Discrete belief over which candidate is the camera wearer, plus a
/// constant-velocity track per candidate.
struct FilterState {
  std::vector<int> ids;
  std::vector<double> weights;
  std::vector<Eigen::Vector2d> positions;   // predicted (after predict) or last observed
  std::vector<Eigen::Vector2d> velocities;  // plane units per frame
  std::vector<Eigen::Vector2d> last_observed;
  std::vector<bool> tracked;  // false until the first observation
  double elapsed = 0.0;       // frames since the last update
  bool low_confidence = false;

  /// Uniform weights, untracked positions.
  static FilterState uniform(std::span<const int> ids);
  std::size_t size() const { return ids.size(); }
};

/// Advances positions by velocity * dt and mixes weights toward uniform:
/// w <- (1 - alpha) w + alpha / n.
FilterState predict(const FilterState& state, double dt, const FilterParams& params = {});

struct FilterUpdate {
  FilterState state;
  std::vector<double> prior;
  std::vector<double> likelihood;
  std::vector<Eigen::Vector2d> predicted;
};

/// Bayes update. likelihood_i = score_i * exp(-|obs_i - pred_i|^2 / 2 sigma_p^2),
/// or the position kernel alone while candidate i is occluded. Untracked
/// candidates get kernel 1. If every likelihood is zero the prior is kept and
/// low_confidence is set.
FilterUpdate update(const FilterState& state, std::span<const double> match_probabilities,
                    std::span<const Eigen::Vector2d> observed_positions,
                    std::span<const bool> occluded, const FilterParams& params = {});

/// Highest posterior weight, ties to the lowest id.
int map_identity(const FilterState& state);

}  // namespace egoloc
