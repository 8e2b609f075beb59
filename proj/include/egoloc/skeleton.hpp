#pragma once

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "egoloc/geometry.hpp"
#include "egoloc/trajectory.hpp"

namespace egoloc {

inline constexpr std::size_t kJointCount = 19;
inline constexpr std::size_t kClipVectorSize = kClipFrames * kJointCount * 3;

// 0-based storage order. Documentation elsewhere uses the 1-based numbering
// (1 = right ankle ... 19 = right ear); Joint::kRightShoulder is joint 9.
enum class Joint : std::size_t {
  kRightAnkle = 0,
  kRightKnee,
  kRightHip,
  kLeftHip,
  kLeftKnee,
  kLeftAnkle,
  kRightWrist,
  kRightElbow,
  kRightShoulder,
  kLeftShoulder,
  kLeftElbow,
  kLeftWrist,
  kNeck,
  kHeadTop,
  kNose,
  kLeftEye,
  kRightEye,
  kLeftEar,
  kRightEar,
};

/// 19 world-space joints (meters).
class Joint19Pose {
 public:
  Joint19Pose();
  explicit Joint19Pose(const std::array<Eigen::Vector3d, kJointCount>& joints);

  const Eigen::Vector3d& operator[](std::size_t i) const { return joints_[i]; }
  const Eigen::Vector3d& operator[](Joint j) const {
    return joints_[static_cast<std::size_t>(j)];
  }
  const std::array<Eigen::Vector3d, kJointCount>& joints() const { return joints_; }

  friend bool operator==(const Joint19Pose& a, const Joint19Pose& b) {
    return a.joints_ == b.joints_;
  }

 private:
  std::array<Eigen::Vector3d, kJointCount> joints_;
};

/// Per-joint displacement between two consecutive frames (meters).
class PoseDelta {
 public:
  PoseDelta();
  explicit PoseDelta(const std::array<Eigen::Vector3d, kJointCount>& deltas);
  /// b - a, joint by joint.
  static PoseDelta between(const Joint19Pose& a, const Joint19Pose& b);

  const Eigen::Vector3d& operator[](std::size_t i) const { return deltas_[i]; }
  const std::array<Eigen::Vector3d, kJointCount>& deltas() const { return deltas_; }

 private:
  std::array<Eigen::Vector3d, kJointCount> deltas_;
};

Joint19Pose operator+(const Joint19Pose& pose, const PoseDelta& delta);

/// Ordered poses at consecutive frames. A full clip has kClipFrames poses;
/// shorter sequences are allowed only when built with `partial`.
class PoseSequence {
 public:
  PoseSequence() = default;
  explicit PoseSequence(std::vector<Joint19Pose> poses, bool partial = false);

  std::size_t size() const { return poses_.size(); }
  bool is_full_clip() const { return poses_.size() == kClipFrames; }
  const Joint19Pose& operator[](std::size_t i) const { return poses_[i]; }
  std::span<const Joint19Pose> poses() const { return poses_; }

  friend bool operator==(const PoseSequence& a, const PoseSequence& b) {
    return a.poses_ == b.poses_;
  }

 private:
  std::vector<Joint19Pose> poses_;
};

/// Element k = init + sum of the first k deltas. Requires exactly 7 deltas.
PoseSequence integrate_pose_deltas(const Joint19Pose& init,
                                   std::span<const PoseDelta> deltas);

/// Body frame from right shoulder, left shoulder and neck: origin at their
/// centroid, x from left to right shoulder, z along the triangle normal with
/// non-negative world z. For a body lying flat the sign choice is arbitrary.
/// Throws DegeneratePose when the triangle is (nearly) collinear.
SE3Transform body_frame(const Joint19Pose& pose);

/// Frame-major, joint-major, then x, y, z: 8 * 19 * 3 = 456 entries.
Eigen::VectorXd pose_clip_vector(const PoseSequence& seq);
/// Inverse of pose_clip_vector.
PoseSequence pose_sequence_from_vector(const Eigen::VectorXd& v);

/// Mean per-joint Euclidean distance.
double pose_distance(const Joint19Pose& a, const Joint19Pose& b);

/// Centroid of the shoulder/neck triangle projected on the third-view plane.
Eigen::Vector2d torso_center_2d(const Joint19Pose& pose);

}  // namespace egoloc
