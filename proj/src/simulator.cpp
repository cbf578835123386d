#include "shctl/simulator.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "shctl/autonomy.hpp"
#include "shctl/shared_controller.hpp"

namespace shctl {

SimState step(const SimState& state, VelocityCommand v, double dt, const OccupancyGrid& grid) {
  SimState next = state;
  next.steps += 1;
  next.clock += dt;
  const WorldPoint from = state.position;
  const WorldPoint target{from.x + v.vx * dt, from.y + v.vy * dt};
  if (is_free_point(grid, target)) {
    next.position = target;
    next.colliding = false;
  } else {
    if (!state.colliding) ++next.collisions;
    next.colliding = true;
    WorldPoint p = from;
    const WorldPoint along_x{p.x + v.vx * dt, p.y};
    if (is_free_point(grid, along_x)) p = along_x;
    const WorldPoint along_y{p.x, p.y + v.vy * dt};
    if (is_free_point(grid, along_y)) p = along_y;
    next.position = p;
  }
  next.path_length += distance(from, next.position);
  return next;
}

TrialResult run_trial(const OccupancyGrid& grid, WorldPoint start, Cell goal,
                      const InputCondition& condition, std::uint64_t seed,
                      const SimParams& params, std::vector<TrajectorySample>* trajectory) {
  if (auto err = validate(condition)) throw TrialConfigError(*err);
  if (!(params.dt > 0.0) || !(params.speed > 0.0) || !(params.timeout > 0.0)) {
    throw TrialConfigError("dt, speed and timeout must be positive");
  }
  if (!is_free_point(grid, start)) throw TrialConfigError("start is not in a free cell");
  if (!grid.is_free(goal)) throw TrialConfigError("goal is not a free cell");
  const PotentialField goal_field = compute_field(grid, goal);
  if (!goal_field.reachable(*world_to_cell(grid, start))) {
    throw TrialConfigError("goal is unreachable from start");
  }

  Rng rng(seed);
  PseudoUser user(condition, params.speed);
  GoalEstimator estimator(grid, params.estimator());
  Autonomy autonomy(grid, params.delta);
  HeldCommand held;
  SimState state;
  state.position = start;

  const WorldPoint goal_center = cell_to_world(grid, goal);
  const auto max_steps = static_cast<std::int64_t>(std::ceil(params.timeout / params.dt - 1e-9));
  auto arrived = [&] { return distance(state.position, goal_center) <= params.goal_radius; };

  bool reached = arrived();
  while (!reached && state.steps < max_steps) {
    const double t = static_cast<double>(state.steps) * params.dt;
    if (auto rec = user.next_input(t, goal_field, grid, state.position, rng)) {
      held = {rec->velocity, t};
      if (condition.mode == ControlMode::Shared) estimator.observe(*rec);
    }
    const ControlOutput out =
        control_tick(state.position, held, estimator.has_estimate() ? &estimator.estimate() : nullptr,
                     condition.mode, autonomy, params.speed);
    if (trajectory) {
      trajectory->push_back({t, state.position.x, state.position.y, out.command.vx,
                             out.command.vy, out.confidence});
    }
    state = step(state, out.command, params.dt, grid);
    reached = arrived();
  }

  TrialResult result;
  result.reached = reached;
  result.collisions = state.collisions;
  result.success = reached && state.collisions == 0;
  result.elapsed = static_cast<double>(state.steps) * params.dt;
  result.path_length = state.path_length;
  result.condition = condition;
  result.seed = seed;
  return result;
}

void write_trajectory_csv(const std::vector<TrajectorySample>& samples, std::ostream& out) {
  out << "t,x,y,vx_shared,vy_shared,c\n";
  char buf[256];
  for (const auto& s : samples) {
    std::snprintf(buf, sizeof(buf), "%.3f,%.6f,%.6f,%.6f,%.6f,%.6f\n", s.t, s.x, s.y, s.vx, s.vy,
                  s.c);
    out << buf;
  }
}

}  // namespace shctl
