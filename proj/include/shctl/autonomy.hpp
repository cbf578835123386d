#ifndef SHCTL_AUTONOMY_HPP_
#define SHCTL_AUTONOMY_HPP_

#include <optional>
#include <stdexcept>

#include "shctl/potential_field.hpp"

namespace shctl {

class UnreachableGoal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Constant-speed descent of the goal's potential field. Zero at the goal
// cell; where the central difference is flat but the cell is not the goal,
// heads for the steepest legal neighbor instead.
VelocityCommand command_from_field(const PotentialField& field, const OccupancyGrid& grid,
                                   WorldPoint x, double speed, double delta = 0.0);

// Stateless form: solves the goal's field and descends it. Throws
// UnreachableGoal when x cannot reach the goal.
VelocityCommand autonomous_command(const OccupancyGrid& grid, Cell goal, WorldPoint x,
                                   double speed);

// Autonomy module with a one-entry field cache keyed by goal cell.
class Autonomy {
 public:
  explicit Autonomy(const OccupancyGrid& grid, double delta = 0.0)
      : grid_(&grid), delta_(delta) {}

  VelocityCommand command(Cell goal, WorldPoint x, double speed);
  const PotentialField& field_for(Cell goal);
  int field_solves() const { return solves_; }

 private:
  const OccupancyGrid* grid_;
  double delta_;
  std::optional<PotentialField> cached_;
  int solves_ = 0;
};

}  // namespace shctl

#endif  // SHCTL_AUTONOMY_HPP_
