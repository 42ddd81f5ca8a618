#pragma once

#include <cmath>

namespace socon {

constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Wrap an angle into (-pi, pi].
inline double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  if (a > kPi) a -= 2.0 * kPi;
  return a;
}

/**
 * Planar rigid transform (x, y, yaw), yaw normalized to (-pi, pi].
 *
 * Acts on points as p' = R(yaw) * p + t. Composition and inverse follow the
 * usual group laws; `log_vee` is the (x, y, wrapped yaw) parameter vector used
 * as the pose-graph residual.
 */
struct SE2 {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;

  SE2() = default;
  SE2(double x_, double y_, double yaw_) : x(x_), y(y_), yaw(wrap_angle(yaw_)) {}

  static SE2 identity() { return SE2{}; }

  SE2 compose(const SE2& o) const {
    const double c = std::cos(yaw), s = std::sin(yaw);
    return SE2(x + c * o.x - s * o.y, y + s * o.x + c * o.y, yaw + o.yaw);
  }

  SE2 inverse() const {
    const double c = std::cos(yaw), s = std::sin(yaw);
    return SE2(-(c * x + s * y), -(-s * x + c * y), -yaw);
  }

  /// Apply to a point in this frame, yielding parent-frame coordinates.
  void apply(double px, double py, double& ox, double& oy) const {
    const double c = std::cos(yaw), s = std::sin(yaw);
    ox = x + c * px - s * py;
    oy = y + s * px + c * py;
  }

  /// Relative pose of `o` expressed in this frame: this^-1 * o.
  SE2 between(const SE2& o) const { return inverse().compose(o); }

  double translation_norm() const { return std::hypot(x, y); }
};

inline SE2 operator*(const SE2& a, const SE2& b) { return a.compose(b); }

}  // namespace socon
