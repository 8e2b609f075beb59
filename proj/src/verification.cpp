#include "egoloc/verification.hpp"

#include <algorithm>
#include <cmath>

#include "egoloc/errors.hpp"

namespace egoloc {

int CandidateObservation::valid_frames() const {
  return static_cast<int>(std::count(valid.begin(), valid.end(), true));
}

void VerificationWeights::validate() const {
  if (!(action >= 0.0) || !std::isfinite(action)) {
    throw ValidationError("action_weight", "must be finite and >= 0");
  }
  if (!(motion >= 0.0) || !std::isfinite(motion)) {
    throw ValidationError("motion_weight", "must be finite and >= 0");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ValidationError("sigma", "must be finite and > 0");
  }
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw ValidationError("tau", "must be finite and > 0");
  }
}

VerificationScore verify_pair(const EgoObservation& ego,
                              const CandidateObservation& candidate,
                              const ActionCodebook& codebook,
                              const VerificationWeights& weights) {
  if (candidate.valid_frames() == 0) {
    throw InsufficientObservation("verify_pair: candidate " +
                                  std::to_string(candidate.person_id) +
                                  " is occluded in every frame");
  }
  const Joint19Pose& handoff = candidate.poses[0];

  VerificationScore score;
  score.person_id = candidate.person_id;

  // Action channel: same deltas, candidate-specific initial pose.
  const PoseSequence ego_seq = integrate_pose_deltas(handoff, ego.pose_deltas);
  const Eigen::VectorXd ego_p = codebook.label_scores(ego_seq, weights.temperature);
  const Eigen::VectorXd third_p = codebook.label_scores(candidate.poses, weights.temperature);
  const ActionAgreement agree =
      action_agreement(ego_p, third_p, codebook, weights.temperature);
  score.action_ego_ce =
      agree.ego_cross_entropy - clamped_cross_entropy(ego_p, agree.ego_label.index);
  score.action_third_ce =
      agree.third_cross_entropy - clamped_cross_entropy(third_p, agree.third_label.index);
  score.action_agreement = agree.agreement;

  // Motion channel: ego increments chained from the candidate's body frame.
  EgoMotionClip seeded = ego.motion;
  seeded.t_init = body_frame(handoff);
  const Trajectory2D ego_traj = integrate_ego_motion(seeded);
  const Trajectory2D box_traj = bbox_trajectory(candidate.boxes);
  const auto third_deltas = third_view_deltas_from_poses(candidate.poses);
  const Trajectory2D third_traj = third_view_translation_from_deltas(third_deltas);
  score.motion_ego_l1 = trajectory_l1_loss(ego_traj, box_traj, candidate.valid);
  score.motion_third_l1 = trajectory_l1_loss(third_traj, box_traj, candidate.valid);

  score.total = weights.action * score.action_ego_ce + weights.action * score.action_third_ce +
                weights.motion * score.motion_ego_l1 + weights.motion * score.motion_third_l1;
  score.match_probability = std::exp(-score.total / weights.sigma);
  return score;
}

PersonId best_candidate(std::span<const VerificationScore> scores) {
  if (scores.empty()) throw InvalidArgument("best_candidate: no scores");
  const VerificationScore* best = &scores.front();
  for (const auto& s : scores) {
    if (s.match_probability > best->match_probability ||
        (s.match_probability == best->match_probability && s.person_id < best->person_id)) {
      best = &s;
    }
  }
  return best->person_id;
}

Localization localize(const EgoObservation& ego,
                      std::span<const CandidateObservation> candidates,
                      const ActionCodebook& codebook, const VerificationWeights& weights) {
  if (candidates.empty()) throw InvalidArgument("localize: no candidates");
  Localization out;
  out.scores.reserve(candidates.size());
  for (const auto& c : candidates) {
    try {
      out.scores.push_back(verify_pair(ego, c, codebook, weights));
    } catch (const InsufficientObservation&) {
      out.scores.push_back({.person_id = c.person_id, .observed = false});
    } catch (const DegeneratePose&) {
      out.scores.push_back({.person_id = c.person_id, .observed = false});
    }
  }
  out.person_id = best_candidate(out.scores);
  return out;
}

}  // namespace egoloc
