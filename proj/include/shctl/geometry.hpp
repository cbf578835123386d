#ifndef SHCTL_GEOMETRY_HPP_
#define SHCTL_GEOMETRY_HPP_

#include <cmath>
#include <cstddef>

namespace shctl {

inline constexpr double kSqrt2 = 1.41421356237309504880;

// Position in the map frame, meters.
struct WorldPoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const WorldPoint&, const WorldPoint&) = default;
};

// Planar translational velocity, meters/second. The robot is holonomic and
// headingless, so this is the whole command.
struct VelocityCommand {
  double vx = 0.0;
  double vy = 0.0;

  double norm() const { return std::hypot(vx, vy); }
  bool is_zero() const { return vx == 0.0 && vy == 0.0; }

  friend bool operator==(const VelocityCommand&, const VelocityCommand&) = default;
  friend VelocityCommand operator+(VelocityCommand a, VelocityCommand b) {
    return {a.vx + b.vx, a.vy + b.vy};
  }
  friend VelocityCommand operator-(VelocityCommand a, VelocityCommand b) {
    return {a.vx - b.vx, a.vy - b.vy};
  }
  friend VelocityCommand operator*(double k, VelocityCommand a) {
    return {k * a.vx, k * a.vy};
  }
};

// Grid cell coordinates. Column x, row y; row 0 is the minimum-y row.
struct Cell {
  int x = 0;
  int y = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
};

inline double distance(WorldPoint a, WorldPoint b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

}  // namespace shctl

#endif  // SHCTL_GEOMETRY_HPP_
