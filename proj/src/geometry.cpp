#include "egoloc/geometry.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>

#include "egoloc/errors.hpp"

namespace egoloc {

namespace {

// Below this angle sin(|d|/2)/|d| is evaluated from its Taylor expansion.
constexpr double kSmallAngle = 1e-7;

}  // namespace

UnitQuaternion::UnitQuaternion(double w, double x, double y, double z) {
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw InvalidArgument("UnitQuaternion: cannot normalize zero or non-finite quaternion");
  }
  w_ = w / n;
  x_ = x / n;
  y_ = y / n;
  z_ = z / n;
}

UnitQuaternion UnitQuaternion::from_matrix(const Eigen::Matrix3d& m) {
  const double trace = m.trace();
  // Shepperd: branch on the largest of (trace, diagonal) for stability.
  if (trace >= m(0, 0) && trace >= m(1, 1) && trace >= m(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + trace);
    return {0.25 * s, (m(2, 1) - m(1, 2)) / s, (m(0, 2) - m(2, 0)) / s,
            (m(1, 0) - m(0, 1)) / s};
  }
  if (m(0, 0) >= m(1, 1) && m(0, 0) >= m(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + m(0, 0) - m(1, 1) - m(2, 2));
    return {(m(2, 1) - m(1, 2)) / s, 0.25 * s, (m(0, 1) + m(1, 0)) / s,
            (m(0, 2) + m(2, 0)) / s};
  }
  if (m(1, 1) >= m(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + m(1, 1) - m(0, 0) - m(2, 2));
    return {(m(0, 2) - m(2, 0)) / s, (m(0, 1) + m(1, 0)) / s, 0.25 * s,
            (m(1, 2) + m(2, 1)) / s};
  }
  const double s = 2.0 * std::sqrt(1.0 + m(2, 2) - m(0, 0) - m(1, 1));
  return {(m(1, 0) - m(0, 1)) / s, (m(0, 2) + m(2, 0)) / s,
          (m(1, 2) + m(2, 1)) / s, 0.25 * s};
}

UnitQuaternion UnitQuaternion::conjugate() const { return {w_, -x_, -y_, -z_}; }

Eigen::Vector3d UnitQuaternion::rotate(const Eigen::Vector3d& v) const {
  // v' = v + 2 u x (u x v + w v), u = vector part.
  const Eigen::Vector3d u = vec();
  const Eigen::Vector3d t = 2.0 * u.cross(v);
  return v + w_ * t + u.cross(t);
}

Eigen::Matrix3d UnitQuaternion::to_matrix() const {
  const double w = w_, x = x_, y = y_, z = z_;
  Eigen::Matrix3d r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return r;
}

SE3Transform SE3Transform::inverse() const {
  const UnitQuaternion r_inv = rotation.conjugate();
  return {r_inv, -r_inv.rotate(translation)};
}

Eigen::Vector3d SE3Transform::apply(const Eigen::Vector3d& point) const {
  return rotation.rotate(point) + translation;
}

Eigen::Matrix4d SE3Transform::to_matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation.to_matrix();
  m.topRightCorner<3, 1>() = translation;
  return m;
}

UnitQuaternion error_quaternion(const RotationDelta& delta) {
  const Eigen::Vector3d& d = delta.delta_theta;
  if (!d.allFinite()) {
    throw InvalidArgument("error_quaternion: non-finite rotation vector");
  }
  const double angle = d.norm();
  if (angle == 0.0) return UnitQuaternion::identity();
  const double half = 0.5 * angle;
  const double k = angle < kSmallAngle ? 0.5 - angle * angle / 48.0
                                       : std::sin(half) / angle;
  return {std::cos(half), k * d.x(), k * d.y(), k * d.z()};
}

RotationDelta rotation_log(const UnitQuaternion& q) {
  double w = q.w();
  Eigen::Vector3d v = q.vec();
  if (w < 0.0) {
    w = -w;
    v = -v;
  }
  w = std::clamp(w, -1.0, 1.0);
  const double n = v.norm();
  if (n == 0.0) return {};
  // atan2 keeps full precision near zero angle where acos(w) would not.
  const double angle = 2.0 * std::atan2(n, w);
  return {v * (angle / n)};
}

UnitQuaternion quat_compose(const UnitQuaternion& a, const UnitQuaternion& b) {
  return {a.w() * b.w() - a.x() * b.x() - a.y() * b.y() - a.z() * b.z(),
          a.w() * b.x() + a.x() * b.w() + a.y() * b.z() - a.z() * b.y(),
          a.w() * b.y() - a.x() * b.z() + a.y() * b.w() + a.z() * b.x(),
          a.w() * b.z() + a.x() * b.y() - a.y() * b.x() + a.z() * b.w()};
}

SE3Transform se3_compose(const SE3Transform& a, const SE3Transform& b) {
  return {quat_compose(a.rotation, b.rotation),
          a.rotation.rotate(b.translation) + a.translation};
}

Trajectory2D warp_to_third_2d(std::span<const SE3Transform> chain) {
  if (chain.empty()) {
    throw InvalidArgument("warp_to_third_2d: empty transform chain");
  }
  std::vector<Eigen::Vector2d> positions;
  positions.reserve(chain.size());
  for (const auto& t : chain) positions.push_back(t.translation.head<2>());
  return Trajectory2D::from_positions(positions);
}

Trajectory2D Trajectory2D::from_positions(std::span<const Eigen::Vector2d> positions) {
  if (positions.empty()) {
    throw InvalidArgument("Trajectory2D: no positions");
  }
  std::vector<Eigen::Vector2d> points;
  points.reserve(positions.size());
  const Eigen::Vector2d origin = positions.front();
  for (const auto& p : positions) points.push_back(p - origin);
  return Trajectory2D(std::move(points));
}

Trajectory2D Trajectory2D::from_points(std::vector<Eigen::Vector2d> points) {
  if (points.empty()) throw InvalidArgument("Trajectory2D: no points");
  if (points.front().x() != 0.0 || points.front().y() != 0.0) {
    throw InvalidArgument("Trajectory2D: first point must be (0, 0)");
  }
  for (const auto& p : points) {
    if (!p.allFinite()) throw InvalidArgument("Trajectory2D: non-finite point");
  }
  return Trajectory2D(std::move(points));
}

}  // namespace egoloc
