#pragma once

#include <array>
#include <span>
#include <vector>

#include "egoloc/action_codebook.hpp"
#include "egoloc/motion.hpp"
#include "egoloc/skeleton.hpp"

namespace egoloc {

using PersonId = int;

/// What the head-mounted camera yields for one clip: 7 joint-space pose
/// variations and 7 body-frame motion increments. The frame-0 handoff pose is
/// taken per candidate from the third view at scoring time.
struct EgoObservation {
  std::array<PoseDelta, kClipDeltas> pose_deltas{};
  EgoMotionClip motion;
};

/// One tracked person in the third view over a clip.
struct CandidateObservation {
  PersonId person_id = 0;
  PoseSequence poses;
  std::array<BoundingBox, kClipFrames> boxes{};
  std::array<bool, kClipFrames> valid{};  // false while occluded

  int valid_frames() const;
  bool fully_visible() const { return valid_frames() == static_cast<int>(kClipFrames); }
};

/// Free parameters of the analytic verifier.
struct VerificationWeights {
  double action = 1.0;  // on both action cross-entropy terms
  double motion = 1.0;  // on both trajectory L1 terms
  double sigma = 1.0;   // match_probability = exp(-total / sigma)
  double temperature = kDefaultLabelTemperature;

  /// Throws ValidationError naming the offending field.
  void validate() const;
};

struct VerificationScore {
  PersonId person_id = 0;
  /// Excess cross-entropy of the ego label scores against the third view's
  /// label over the ego's own label: -log p_e[l_t] + log p_e[l_e] >= 0.
  double action_ego_ce = 0.0;
  /// Symmetric counterpart on the third-view scores.
  double action_third_ce = 0.0;
  /// L1 between the box trajectory and the ego-integrated trajectory.
  double motion_ego_l1 = 0.0;
  /// L1 between the box trajectory and the pose-derived third-view trajectory.
  double motion_third_l1 = 0.0;
  double total = 0.0;
  double match_probability = 0.0;
  double action_agreement = 0.0;
  /// False when the candidate could not be scored (fully occluded or
  /// degenerate handoff pose); such candidates carry match_probability 0.
  bool observed = true;
};

/// Scores one ego/candidate pair. The ego pose sequence is rebuilt from the
/// candidate's frame-0 pose, and the ego motion chain is seeded at that pose's
/// body frame. Trajectory terms skip occluded frames.
/// Throws DegeneratePose or InsufficientObservation.
VerificationScore verify_pair(const EgoObservation& ego,
                              const CandidateObservation& candidate,
                              const ActionCodebook& codebook,
                              const VerificationWeights& weights = {});

struct Localization {
  PersonId person_id = 0;
  std::vector<VerificationScore> scores;  // in candidate order
};

/// Picks the candidate with the highest match probability, ties to the
/// lowest person id. Unscorable candidates are kept with observed = false.
/// Throws InvalidArgument on an empty candidate list.
Localization localize(const EgoObservation& ego,
                      std::span<const CandidateObservation> candidates,
                      const ActionCodebook& codebook,
                      const VerificationWeights& weights = {});

/// Argmax over scores by match probability, ties to the lowest person id.
PersonId best_candidate(std::span<const VerificationScore> scores);

}  // namespace egoloc
