#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "egoloc/motion.hpp"
#include "egoloc/skeleton.hpp"
#include "egoloc/verification.hpp"

namespace egoloc {

/// Procedural walking style. Two people with equal GaitParams are
/// indistinguishable in pose statistics ("same dressing").
struct GaitParams {
  double speed = 0.1;            // plane units (m) per frame
  double stride_length = 1.2;    // meters walked per full gait cycle
  double arm_swing = 0.15;       // wrist excursion, meters
  double leg_swing = 0.20;       // ankle excursion, meters
  double bob = 0.02;             // vertical torso oscillation, meters
  double height = 1.0;           // body scale
  double shoulder_half_width = 0.20;
  double phase = 0.0;            // gait phase at frame 0, radians
  double facing = 0.0;           // heading when the path gives none, radians
  friend bool operator==(const GaitParams&, const GaitParams&) = default;
};

struct PersonSpec {
  PersonId id = 0;
  bool is_wearer = false;
  std::vector<Eigen::Vector2d> waypoints;  // piecewise-linear path in the plane
  bool loop = false;                       // wrap from the last waypoint to the first
  double path_offset = 0.0;                // arc length already walked at frame 0
  GaitParams gait;
};

struct NoiseConfig {
  double pose = 0.0;       // per joint coordinate, meters (third-view poses and ego pose deltas)
  double odo_trans = 0.0;  // ego translation increments, meters
  double odo_rot = 0.0;    // ego rotation-vector increments, radians
  double bbox = 0.0;       // per box corner coordinate, plane units
  double occlusion = 0.0;  // extra per-coordinate pose noise on occluded frames

  static NoiseConfig zero() { return {}; }
};

/// Frames [start, end) during which the two persons occlude each other.
struct CrossingInterval {
  PersonId a = 0;
  PersonId b = 0;
  int start = 0;
  int end = 0;
};

struct Scenario {
  std::uint64_t seed = 0;
  int duration = 8;  // frames
  std::vector<PersonSpec> persons;
  NoiseConfig noise;
  std::vector<CrossingInterval> crossings;
  /// Sync fault: ego observables come from wearer frames shifted by this many frames.
  int ego_time_offset = 0;
  /// Every person walks with the wearer's gait parameters.
  bool same_gait = false;

  /// Throws ValidationError naming the offending field.
  void validate() const;
  const PersonSpec& wearer() const;
  Scenario with_noise(const NoiseConfig& noise) const;
};

struct ClipObservation {
  int clip_id = 0;
  int start_frame = 0;
  EgoObservation ego;
  std::vector<CandidateObservation> candidates;  // ordered by person id
  PersonId ground_truth_wearer = 0;
};

struct Scene {
  Scenario scenario;
  std::vector<ClipObservation> clips;
};

/// Ground-truth body of a person at every frame (world meters, lattice-snapped).
std::vector<Joint19Pose> simulate_person_frames(const PersonSpec& person, int duration);

/// Gait skeleton at a given plane position, heading and gait phase.
Joint19Pose gait_pose(const GaitParams& gait, const Eigen::Vector2d& position, double heading,
                      double phase);

/// Box centered on the torso with half-extents covering every joint, padded.
BoundingBox bounding_box_from_pose(const Joint19Pose& pose, double padding = 0.10);

struct EgoTruth {
  std::array<PoseDelta, kClipDeltas> pose_deltas{};
  EgoMotionClip motion;
};

/// Exact ego observables for one clip of wearer frames:
/// pose deltas p_{k+1} - p_k, motion increments inv(B_k) o B_{k+1} with B the
/// body frame, and t_init = B_0. Throws DegeneratePose.
EgoTruth ego_deltas_from_truth(std::span<const Joint19Pose> frames);

/// Noise-corrupted clips with stride 1. Deterministic for a given seed,
/// independent of `threads`.
Scene generate_scene(const Scenario& scenario, unsigned threads = 1);

/// Per-person, per-frame occlusion flags implied by the crossing schedule.
std::vector<std::vector<bool>> occlusion_flags(const Scenario& scenario);

/// Frames where two persons' torso centers are closer than `radius`, merged
/// into intervals.
std::vector<CrossingInterval> detect_crossings(const Scenario& scenario, double radius);

/// Named scenario layouts:
/// single-static, two-person-no-crossing, two-person-crossing,
/// three-person-no-crossing, three-person-crossing, group-crossing,
/// same-dressing-two-person-no-crossing, same-dressing-three-person-crossing.
Scenario make_preset(const std::string& name, std::uint64_t seed, int duration,
                     const NoiseConfig& noise);
std::vector<std::string> preset_names();

}  // namespace egoloc
