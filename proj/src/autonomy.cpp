#include "shctl/autonomy.hpp"

namespace shctl {

VelocityCommand command_from_field(const PotentialField& field, const OccupancyGrid& grid,
                                   WorldPoint x, double speed, double delta) {
  const auto cell = world_to_cell(grid, x);
  if (!cell || !grid.is_free(*cell)) {
    throw FieldError("robot position is outside free space");
  }
  if (!field.reachable(*cell)) {
    throw UnreachableGoal("goal unreachable from the robot position");
  }
  if (*cell == field.goal()) return {};
  if (auto v = desired_velocity(field, grid, x, speed, delta)) return *v;
  return steepest_neighbor_velocity(field, grid, x, speed).value_or(VelocityCommand{});
}

VelocityCommand autonomous_command(const OccupancyGrid& grid, Cell goal, WorldPoint x,
                                   double speed) {
  return command_from_field(compute_field(grid, goal), grid, x, speed);
}

const PotentialField& Autonomy::field_for(Cell goal) {
  if (!cached_ || !(cached_->goal() == goal)) {
    cached_ = compute_field(*grid_, goal);
    ++solves_;
  }
  return *cached_;
}

VelocityCommand Autonomy::command(Cell goal, WorldPoint x, double speed) {
  return command_from_field(field_for(goal), *grid_, x, speed, delta_);
}

}  // namespace shctl
