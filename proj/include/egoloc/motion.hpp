#pragma once

#include <Eigen/Core>

#include <array>
#include <span>

#include "egoloc/geometry.hpp"
#include "egoloc/skeleton.hpp"
#include "egoloc/trajectory.hpp"

namespace egoloc {

/// Axis-aligned box in the third-view plane.
struct BoundingBox {
  Eigen::Vector2d left_top = Eigen::Vector2d::Zero();
  Eigen::Vector2d right_bottom = Eigen::Vector2d::Zero();

  BoundingBox() = default;
  /// Throws InvalidArgument unless lx <= rx and ly <= ry.
  BoundingBox(double lx, double ly, double rx, double ry);

  Eigen::Vector2d center() const { return 0.5 * (left_top + right_bottom); }
};

/// One frame-to-frame ego transform, expressed in the body frame at frame k.
struct EgoMotionDelta {
  RotationDelta rotation;
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
};

struct EgoMotionClip {
  SE3Transform t_init;  // third-view body frame at clip start
  std::array<EgoMotionDelta, kClipDeltas> deltas{};
};

/// Box centers re-based on the first box. Needs exactly 8 boxes.
Trajectory2D bbox_trajectory(std::span<const BoundingBox> boxes);

/// T_init, T_init dT_1, ..., T_init dT_1 ... dT_7, warped to the plane.
Trajectory2D integrate_ego_motion(const EgoMotionClip& clip);
/// The full transform chain behind integrate_ego_motion.
std::array<SE3Transform, kClipFrames> ego_motion_chain(const EgoMotionClip& clip);

/// Sum over frames of |dx| + |dy|. Throws on length mismatch.
double trajectory_l1_loss(const Trajectory2D& predicted, const Trajectory2D& reference);
/// Same, restricted to frames whose mask entry is true.
double trajectory_l1_loss(const Trajectory2D& predicted, const Trajectory2D& reference,
                          std::span<const bool> frame_mask);

/// Prefix sums of 7 frame-to-frame plane translations, starting at (0, 0).
Trajectory2D third_view_translation_from_deltas(std::span<const Eigen::Vector2d> deltas);

/// Frame-to-frame torso-center translations of a pose sequence: the third
/// view's own estimate of (dx, dy).
std::array<Eigen::Vector2d, kClipDeltas> third_view_deltas_from_poses(const PoseSequence& seq);

}  // namespace egoloc
