#include "egoloc/bayes_filter.hpp"

#include <cmath>
#include <numeric>

#include "egoloc/errors.hpp"

namespace egoloc {

void FilterParams::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("alpha", "must lie in [0, 1]");
  if (!(beta >= 0.0 && beta <= 1.0)) throw ValidationError("beta", "must lie in [0, 1]");
  if (!(sigma_p > 0.0) || !std::isfinite(sigma_p)) {
    throw ValidationError("sigma_p", "must be finite and > 0");
  }
}

FilterState FilterState::uniform(std::span<const int> ids) {
  if (ids.empty()) throw InvalidArgument("FilterState: no candidates");
  const std::size_t n = ids.size();
  FilterState s;
  s.ids.assign(ids.begin(), ids.end());
  s.weights.assign(n, 1.0 / static_cast<double>(n));
  s.positions.assign(n, Eigen::Vector2d::Zero());
  s.velocities.assign(n, Eigen::Vector2d::Zero());
  s.last_observed.assign(n, Eigen::Vector2d::Zero());
  s.tracked.assign(n, false);
  return s;
}

FilterState predict(const FilterState& state, double dt, const FilterParams& params) {
  FilterState next = state;
  const double n = static_cast<double>(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) {
    next.positions[i] = state.positions[i] + state.velocities[i] * dt;
    next.weights[i] = (1.0 - params.alpha) * state.weights[i] + params.alpha / n;
  }
  next.elapsed = state.elapsed + dt;
  return next;
}

FilterUpdate update(const FilterState& state, std::span<const double> match_probabilities,
                    std::span<const Eigen::Vector2d> observed_positions,
                    std::span<const bool> occluded, const FilterParams& params) {
  const std::size_t n = state.size();
  if (match_probabilities.size() != n || observed_positions.size() != n ||
      occluded.size() != n) {
    throw InvalidArgument("filter update: inputs not aligned with the candidate set");
  }

  FilterUpdate out;
  out.prior = state.weights;
  out.predicted = state.positions;
  out.likelihood.resize(n);
  out.state = state;
  FilterState& next = out.state;

  const double two_var = 2.0 * params.sigma_p * params.sigma_p;
  for (std::size_t i = 0; i < n; ++i) {
    const double kernel =
        state.tracked[i]
            ? std::exp(-(observed_positions[i] - state.positions[i]).squaredNorm() / two_var)
            : 1.0;
    out.likelihood[i] = occluded[i] ? kernel : match_probabilities[i] * kernel;
  }

  std::vector<double> posterior(n);
  for (std::size_t i = 0; i < n; ++i) posterior[i] = state.weights[i] * out.likelihood[i];
  const double mass = std::accumulate(posterior.begin(), posterior.end(), 0.0);
  if (mass > 0.0 && std::isfinite(mass)) {
    for (auto& w : posterior) w /= mass;
    next.weights = std::move(posterior);
    next.low_confidence = false;
  } else {
    next.low_confidence = true;
  }

  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d& obs = observed_positions[i];
    if (state.tracked[i] && state.elapsed > 0.0) {
      const Eigen::Vector2d diff = (obs - state.last_observed[i]) / state.elapsed;
      next.velocities[i] = params.beta * state.velocities[i] + (1.0 - params.beta) * diff;
    }
    next.positions[i] = obs;
    next.last_observed[i] = obs;
    next.tracked[i] = true;
  }
  next.elapsed = 0.0;
  return out;
}

int map_identity(const FilterState& state) {
  if (state.size() == 0) throw InvalidArgument("map_identity: empty state");
  std::size_t best = 0;
  for (std::size_t i = 1; i < state.size(); ++i) {
    if (state.weights[i] > state.weights[best] ||
        (state.weights[i] == state.weights[best] && state.ids[i] < state.ids[best])) {
      best = i;
    }
  }
  return state.ids[best];
}

}  // namespace egoloc
