#ifndef SHCTL_PSEUDO_USER_HPP_
#define SHCTL_PSEUDO_USER_HPP_

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>

#include "shctl/goal_estimator.hpp"
#include "shctl/potential_field.hpp"
#include "shctl/shared_controller.hpp"

namespace shctl {

// Input randomness. std::mt19937_64 has a standardized output sequence; the
// draws below use raw outputs only (no std distributions, whose algorithms
// are implementation-defined).
using Rng = std::mt19937_64;

// Uniform double in [0, 1) from the top 53 bits of one output.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

enum class DirectionSet { All, Eight, Four };

std::string_view to_string(DirectionSet d);
std::optional<DirectionSet> parse_direction_set(std::string_view text);

// Number of discrete directions (0 for All).
int direction_count(DirectionSet d);

// Direction `index` at magnitude `speed`. Index 0 is +x, counting
// counter-clockwise in steps of 360/count degrees (Four: +x, +y, -x, -y).
VelocityCommand direction_vector(DirectionSet d, int index, double speed);

// Index of the set direction nearest in angle to v; exact ties go to the
// smaller index. Requires a discrete set and nonzero v.
int nearest_direction(DirectionSet d, VelocityCommand v);

struct InputCondition {
  DirectionSet directions = DirectionSet::All;
  double accuracy = 1.0;
  double period = 1.0;  // seconds between accepted inputs
  ControlMode mode = ControlMode::Shared;
};

// Empty when valid, otherwise a field-level message.
std::optional<std::string> validate(const InputCondition& condition);

// Ideal command toward the true goal: the potential-field descent velocity.
// Zero at the goal cell.
VelocityCommand ideal_command(const PotentialField& goal_field, const OccupancyGrid& grid,
                              WorldPoint x, double speed);
VelocityCommand ideal_command(const OccupancyGrid& grid, Cell true_goal, WorldPoint x,
                              double speed);

// Snap to the nearest allowed direction at magnitude `speed`. All and zero
// vectors pass through unchanged.
VelocityCommand quantize(VelocityCommand v, DirectionSet directions, double speed);

// With probability `accuracy` returns v_q, otherwise a uniformly drawn
// different direction of the set at magnitude `speed`. Discrete sets always
// consume exactly two rng outputs (Bernoulli draw, then direction draw); All
// is never corrupted and consumes none.
VelocityCommand corrupt(VelocityCommand v_q, const InputCondition& condition, double speed,
                        Rng& rng);

// Scripted operator: one command per period boundary, ideal -> quantize ->
// corrupt.
class PseudoUser {
 public:
  PseudoUser(InputCondition condition, double speed)
      : condition_(condition), speed_(speed) {}

  std::optional<CommandRecord> next_input(double clock, const PotentialField& goal_field,
                                          const OccupancyGrid& grid, WorldPoint x, Rng& rng);

  // Last ideal (pre-quantization) command, for logging.
  VelocityCommand last_ideal() const { return last_ideal_; }

 private:
  InputCondition condition_;
  double speed_;
  std::int64_t next_boundary_ = 0;
  VelocityCommand last_ideal_{};
};

}  // namespace shctl

#endif  // SHCTL_PSEUDO_USER_HPP_
