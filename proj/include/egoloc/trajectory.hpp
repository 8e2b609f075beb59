#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <vector>

namespace egoloc {

inline constexpr std::size_t kClipFrames = 8;
inline constexpr std::size_t kClipDeltas = kClipFrames - 1;

/// Ordered 2D translations in third-view plane coordinates, anchored so the
/// first point is exactly (0, 0). Clip-level producers emit kClipFrames points.
class Trajectory2D {
 public:
  Trajectory2D() = default;

  /// Re-bases absolute positions on the first one. Throws on empty input.
  static Trajectory2D from_positions(std::span<const Eigen::Vector2d> positions);
  /// Takes already-anchored points. Throws unless points[0] == (0, 0).
  static Trajectory2D from_points(std::vector<Eigen::Vector2d> points);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const Eigen::Vector2d& operator[](std::size_t i) const { return points_[i]; }
  std::span<const Eigen::Vector2d> points() const { return points_; }
  auto begin() const { return points_.begin(); }
  auto end() const { return points_.end(); }

 private:
  explicit Trajectory2D(std::vector<Eigen::Vector2d> points)
      : points_(std::move(points)) {}
  std::vector<Eigen::Vector2d> points_;
};

}  // namespace egoloc
