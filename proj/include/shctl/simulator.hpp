#ifndef SHCTL_SIMULATOR_HPP_
#define SHCTL_SIMULATOR_HPP_

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "shctl/goal_estimator.hpp"
#include "shctl/pseudo_user.hpp"

namespace shctl {

class TrialConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SimParams {
  double speed = 0.3;        // s, m/s
  double dt = 0.05;          // s
  double timeout = 120.0;    // s of simulated time
  double goal_radius = 0.3;  // m
  std::size_t window = 10;   // N
  double threshold = 0.95;   // T
  double beta = 4.0;
  double delta = 0.0;        // <= 0: one cell
  kernels::Backend backend = kernels::Backend::OpenMP;

  EstimatorParams estimator() const {
    return {window, threshold, beta, speed, delta, backend};
  }
};

// Point robot on an inflated map: a point inside an Occupied cell is a
// footprint collision.
struct SimState {
  WorldPoint position{};
  std::int64_t steps = 0;
  double clock = 0.0;
  double path_length = 0.0;
  int collisions = 0;
  bool colliding = false;  // inside a contact episode
};

// Integrates v for dt. A blocked move leaves the robot in place and tries
// the x then y axis components separately (sliding). Contact episodes are
// counted once, on the first blocked step.
SimState step(const SimState& state, VelocityCommand v, double dt, const OccupancyGrid& grid);

struct TrialResult {
  bool success = false;  // reached and no collisions
  bool reached = false;
  int collisions = 0;
  double elapsed = 0.0;
  double path_length = 0.0;
  InputCondition condition{};
  std::uint64_t seed = 0;
};

struct TrajectorySample {
  double t;
  double x;
  double y;
  double vx;
  double vy;
  double c;
};

// Runs one trial to arrival or timeout. Deterministic in its arguments.
// Throws TrialConfigError if start/goal are not Free or the goal cannot be
// reached from start.
TrialResult run_trial(const OccupancyGrid& grid, WorldPoint start, Cell goal,
                      const InputCondition& condition, std::uint64_t seed,
                      const SimParams& params, std::vector<TrajectorySample>* trajectory = nullptr);

// Header `t,x,y,vx_shared,vy_shared,c`.
void write_trajectory_csv(const std::vector<TrajectorySample>& samples, std::ostream& out);

}  // namespace shctl

#endif  // SHCTL_SIMULATOR_HPP_
