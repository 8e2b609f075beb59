#include "egoloc/motion.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "egoloc/errors.hpp"

namespace egoloc {

BoundingBox::BoundingBox(double lx, double ly, double rx, double ry)
    : left_top(lx, ly), right_bottom(rx, ry) {
  if (!left_top.allFinite() || !right_bottom.allFinite()) {
    throw InvalidArgument("BoundingBox: non-finite corner");
  }
  if (lx > rx || ly > ry) {
    throw InvalidArgument("BoundingBox: left-top must not exceed right-bottom");
  }
}

Trajectory2D bbox_trajectory(std::span<const BoundingBox> boxes) {
  if (boxes.size() != kClipFrames) {
    throw InvalidArgument("bbox_trajectory: expected " + std::to_string(kClipFrames) +
                          " boxes, got " + std::to_string(boxes.size()));
  }
  std::vector<Eigen::Vector2d> centers;
  centers.reserve(boxes.size());
  for (const auto& b : boxes) centers.push_back(b.center());
  return Trajectory2D::from_positions(centers);
}

std::array<SE3Transform, kClipFrames> ego_motion_chain(const EgoMotionClip& clip) {
  std::array<SE3Transform, kClipFrames> chain;
  chain[0] = clip.t_init;
  for (std::size_t i = 0; i < kClipDeltas; ++i) {
    const auto& d = clip.deltas[i];
    if (!d.translation.allFinite()) {
      throw InvalidArgument("integrate_ego_motion: non-finite translation delta");
    }
    const SE3Transform step{error_quaternion(d.rotation), d.translation};
    chain[i + 1] = se3_compose(chain[i], step);
  }
  return chain;
}

Trajectory2D integrate_ego_motion(const EgoMotionClip& clip) {
  const auto chain = ego_motion_chain(clip);
  return warp_to_third_2d(chain);
}

double trajectory_l1_loss(const Trajectory2D& predicted, const Trajectory2D& reference) {
  if (predicted.size() != reference.size()) {
    throw InvalidArgument("trajectory_l1_loss: length mismatch");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    sum += (predicted[i] - reference[i]).cwiseAbs().sum();
  }
  return sum;
}

double trajectory_l1_loss(const Trajectory2D& predicted, const Trajectory2D& reference,
                          std::span<const bool> frame_mask) {
  if (predicted.size() != reference.size() || frame_mask.size() != predicted.size()) {
    throw InvalidArgument("trajectory_l1_loss: length mismatch");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (frame_mask[i]) sum += (predicted[i] - reference[i]).cwiseAbs().sum();
  }
  return sum;
}

Trajectory2D third_view_translation_from_deltas(std::span<const Eigen::Vector2d> deltas) {
  if (deltas.size() != kClipDeltas) {
    throw InvalidArgument("third_view_translation_from_deltas: expected " +
                          std::to_string(kClipDeltas) + " deltas");
  }
  std::vector<Eigen::Vector2d> points;
  points.reserve(kClipFrames);
  points.emplace_back(0.0, 0.0);
  for (const auto& d : deltas) points.push_back(points.back() + d);
  return Trajectory2D::from_points(std::move(points));
}

std::array<Eigen::Vector2d, kClipDeltas> third_view_deltas_from_poses(const PoseSequence& seq) {
  if (!seq.is_full_clip()) {
    throw InvalidArgument("third_view_deltas_from_poses: partial sequence");
  }
  std::array<Eigen::Vector2d, kClipDeltas> out;
  for (std::size_t i = 0; i < kClipDeltas; ++i) {
    out[i] = torso_center_2d(seq[i + 1]) - torso_center_2d(seq[i]);
  }
  return out;
}

}  // namespace egoloc
