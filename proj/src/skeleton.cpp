#include "egoloc/skeleton.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <string>

#include "egoloc/errors.hpp"

namespace egoloc {

namespace {

constexpr double kMinTriangleArea = 1e-9;

void require_finite(const std::array<Eigen::Vector3d, kJointCount>& joints,
                    const char* what) {
  for (const auto& j : joints) {
    if (!j.allFinite()) throw InvalidArgument(std::string(what) + ": non-finite joint");
  }
}

std::array<Eigen::Vector3d, kJointCount> zero_joints() {
  std::array<Eigen::Vector3d, kJointCount> out;
  out.fill(Eigen::Vector3d::Zero());
  return out;
}

}  // namespace

Joint19Pose::Joint19Pose() : joints_(zero_joints()) {}

Joint19Pose::Joint19Pose(const std::array<Eigen::Vector3d, kJointCount>& joints)
    : joints_(joints) {
  require_finite(joints_, "Joint19Pose");
}

PoseDelta::PoseDelta() : deltas_(zero_joints()) {}

PoseDelta::PoseDelta(const std::array<Eigen::Vector3d, kJointCount>& deltas)
    : deltas_(deltas) {
  require_finite(deltas_, "PoseDelta");
}

PoseDelta PoseDelta::between(const Joint19Pose& a, const Joint19Pose& b) {
  std::array<Eigen::Vector3d, kJointCount> d;
  for (std::size_t i = 0; i < kJointCount; ++i) d[i] = b[i] - a[i];
  return PoseDelta(d);
}

Joint19Pose operator+(const Joint19Pose& pose, const PoseDelta& delta) {
  std::array<Eigen::Vector3d, kJointCount> j;
  for (std::size_t i = 0; i < kJointCount; ++i) j[i] = pose[i] + delta[i];
  return Joint19Pose(j);
}

PoseSequence::PoseSequence(std::vector<Joint19Pose> poses, bool partial)
    : poses_(std::move(poses)) {
  if (poses_.empty()) throw InvalidArgument("PoseSequence: no poses");
  if (!partial && poses_.size() != kClipFrames) {
    throw InvalidArgument("PoseSequence: a full clip has " +
                          std::to_string(kClipFrames) + " poses, got " +
                          std::to_string(poses_.size()));
  }
}

PoseSequence integrate_pose_deltas(const Joint19Pose& init,
                                   std::span<const PoseDelta> deltas) {
  if (deltas.size() != kClipDeltas) {
    throw InvalidArgument("integrate_pose_deltas: expected " +
                          std::to_string(kClipDeltas) + " deltas, got " +
                          std::to_string(deltas.size()));
  }
  std::vector<Joint19Pose> poses;
  poses.reserve(kClipFrames);
  poses.push_back(init);
  // Running sum: p_k = p_{k-1} + d_k, i.e. init + (d_1 + ... + d_k).
  for (const auto& d : deltas) poses.push_back(poses.back() + d);
  return PoseSequence(std::move(poses));
}

SE3Transform body_frame(const Joint19Pose& pose) {
  const Eigen::Vector3d& right = pose[Joint::kRightShoulder];
  const Eigen::Vector3d& left = pose[Joint::kLeftShoulder];
  const Eigen::Vector3d& neck = pose[Joint::kNeck];

  const Eigen::Vector3d across = right - left;
  Eigen::Vector3d normal = across.cross(neck - left);
  const double normal_norm = normal.norm();
  if (normal_norm < kMinTriangleArea || across.norm() < kMinTriangleArea) {
    throw DegeneratePose("body_frame: shoulder/neck triangle is degenerate");
  }
  const Eigen::Vector3d x = across.normalized();
  normal /= normal_norm;
  if (normal.z() < 0.0) normal = -normal;
  const Eigen::Vector3d y = normal.cross(x);

  Eigen::Matrix3d r;
  r.col(0) = x;
  r.col(1) = y;
  r.col(2) = normal;
  return {UnitQuaternion::from_matrix(r), (right + left + neck) / 3.0};
}

Eigen::VectorXd pose_clip_vector(const PoseSequence& seq) {
  if (!seq.is_full_clip()) {
    throw InvalidArgument("pose_clip_vector: partial sequence of " +
                          std::to_string(seq.size()) + " poses");
  }
  Eigen::VectorXd v(kClipVectorSize);
  std::size_t k = 0;
  for (const auto& pose : seq.poses()) {
    for (const auto& j : pose.joints()) {
      v[k++] = j.x();
      v[k++] = j.y();
      v[k++] = j.z();
    }
  }
  return v;
}

PoseSequence pose_sequence_from_vector(const Eigen::VectorXd& v) {
  if (static_cast<std::size_t>(v.size()) != kClipVectorSize) {
    throw InvalidArgument("pose_sequence_from_vector: expected " +
                          std::to_string(kClipVectorSize) + " entries");
  }
  std::vector<Joint19Pose> poses;
  poses.reserve(kClipFrames);
  std::size_t k = 0;
  for (std::size_t f = 0; f < kClipFrames; ++f) {
    std::array<Eigen::Vector3d, kJointCount> joints;
    for (auto& j : joints) {
      j = Eigen::Vector3d(v[k], v[k + 1], v[k + 2]);
      k += 3;
    }
    poses.emplace_back(joints);
  }
  return PoseSequence(std::move(poses));
}

double pose_distance(const Joint19Pose& a, const Joint19Pose& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < kJointCount; ++i) sum += (a[i] - b[i]).norm();
  return sum / static_cast<double>(kJointCount);
}

Eigen::Vector2d torso_center_2d(const Joint19Pose& pose) {
  const Eigen::Vector3d c =
      (pose[Joint::kRightShoulder] + pose[Joint::kLeftShoulder] + pose[Joint::kNeck]) / 3.0;
  return c.head<2>();
}

}  // namespace egoloc
