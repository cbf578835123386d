#ifndef SHCTL_POTENTIAL_FIELD_HPP_
#define SHCTL_POTENTIAL_FIELD_HPP_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "shctl/gridmap.hpp"

namespace shctl {

class FieldError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

// Travel cost in meters from every cell to one goal cell along 8-connected
// obstacle-free paths. Cardinal steps cost one resolution, diagonal steps
// resolution * sqrt(2). Occupied and disconnected cells hold kUnreachable.
class PotentialField {
 public:
  PotentialField(Cell goal, int width, int height, double resolution,
                 std::vector<double> values);

  Cell goal() const { return goal_; }
  int width() const { return width_; }
  int height() const { return height_; }
  double resolution() const { return resolution_; }

  double value(Cell c) const {
    return values_[static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width_) +
                   static_cast<std::size_t>(c.x)];
  }
  double value(std::size_t index) const { return values_[index]; }
  bool reachable(Cell c) const { return value(c) != kUnreachable; }
  std::span<const double> values() const { return values_; }

 private:
  Cell goal_;
  int width_;
  int height_;
  double resolution_;
  std::vector<double> values_;
};

// Exact 8-connected Dijkstra from `goal`. A diagonal step is allowed only when
// both cardinal cells it passes between are Free (no corner cutting).
// Path costs are accumulated as integer (cardinal, diagonal) step counts, so
// every route with the same step mix has the bit-identical value
// resolution * (cardinal + diagonal * sqrt(2)).
PotentialField compute_field(const OccupancyGrid& grid, Cell goal);

// Convenience for the step-count convention above.
inline double path_cost(double resolution, std::uint32_t cardinal, std::uint32_t diagonal) {
  return resolution * (static_cast<double>(cardinal) + static_cast<double>(diagonal) * kSqrt2);
}

// Value sampled at a world point for a central difference: the containing
// cell's value, or `fallback` when that cell is outside, Occupied or
// unreachable.
double sample_or(const PotentialField& field, const OccupancyGrid& grid, WorldPoint p,
                 double fallback);

// Central-difference slope of the field at x with step `delta` meters
// (delta <= 0 selects one cell). Blocked samples are replaced by value(x) +
// delta so the slope always points back into free space. Throws FieldError if
// x is not inside a Free cell or cannot reach the goal.
std::array<double, 2> gradient_at(const PotentialField& field, const OccupancyGrid& grid,
                                  WorldPoint x, double delta = 0.0);

// Negated gradient rescaled to magnitude `speed`; nullopt when the gradient is
// zero (at the goal, or on a plateau).
std::optional<VelocityCommand> desired_velocity(const PotentialField& field,
                                                const OccupancyGrid& grid, WorldPoint x,
                                                double speed, double delta = 0.0);

// Direction toward the lowest-valued legal 8-neighbor of x's cell at
// magnitude `speed`; nullopt at the goal cell. Used where the central
// difference is flat but the cell is not the goal.
std::optional<VelocityCommand> steepest_neighbor_velocity(const PotentialField& field,
                                                          const OccupancyGrid& grid,
                                                          WorldPoint x, double speed);

// Row-major CSV, one map row per line (row 0 first), `inf` for unreachable.
void write_field_csv(const PotentialField& field, std::ostream& out);

}  // namespace shctl

#endif  // SHCTL_POTENTIAL_FIELD_HPP_
