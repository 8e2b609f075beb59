#pragma once

#include <Eigen/Core>

#include <span>
#include <vector>

#include "egoloc/trajectory.hpp"

namespace egoloc {

/// Unit quaternion, Hamilton convention, scalar first. Construction always
/// normalizes; the zero quaternion is rejected.
class UnitQuaternion {
 public:
  UnitQuaternion() = default;
  UnitQuaternion(double w, double x, double y, double z);

  static UnitQuaternion identity() { return {}; }
  /// Shepperd's method; `rotation` must be orthonormal with det +1.
  static UnitQuaternion from_matrix(const Eigen::Matrix3d& rotation);

  double w() const { return w_; }
  double x() const { return x_; }
  double y() const { return y_; }
  double z() const { return z_; }
  Eigen::Vector3d vec() const { return {x_, y_, z_}; }

  UnitQuaternion conjugate() const;
  Eigen::Vector3d rotate(const Eigen::Vector3d& v) const;
  Eigen::Matrix3d to_matrix() const;

 private:
  double w_ = 1.0;
  double x_ = 0.0;
  double y_ = 0.0;
  double z_ = 0.0;
};

/// Rotation vector (axis times angle, radians). The stored 3-parameter form of
/// a frame-to-frame rotation.
struct RotationDelta {
  Eigen::Vector3d delta_theta = Eigen::Vector3d::Zero();
};

/// Rigid transform x -> R x + t.
struct SE3Transform {
  UnitQuaternion rotation;
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static SE3Transform identity() { return {}; }
  SE3Transform inverse() const;
  Eigen::Vector3d apply(const Eigen::Vector3d& point) const;
  Eigen::Matrix4d to_matrix() const;
};

/// Quaternion exponential of half the rotation vector:
/// [cos(|d|/2); sin(|d|/2) d/|d|], exactly identity for d = 0.
/// Throws InvalidArgument on non-finite input.
UnitQuaternion error_quaternion(const RotationDelta& delta);

/// Inverse of error_quaternion for angles in [0, pi]. Picks the w >= 0
/// representative so the result has norm <= pi.
RotationDelta rotation_log(const UnitQuaternion& q);

/// Hamilton product a (x) b, renormalized. Rotating by the result equals
/// rotating by b first, then by a.
UnitQuaternion quat_compose(const UnitQuaternion& a, const UnitQuaternion& b);

/// a o b: rotation a.R b.R, translation a.R b.t + a.t.
SE3Transform se3_compose(const SE3Transform& a, const SE3Transform& b);

/// Projects each transform's translation onto the third-view (world x-y) plane
/// and re-bases the sequence on its first element. Throws on an empty chain.
Trajectory2D warp_to_third_2d(std::span<const SE3Transform> chain);

}  // namespace egoloc
