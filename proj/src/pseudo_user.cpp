#include "shctl/pseudo_user.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "shctl/autonomy.hpp"

namespace shctl {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kClockSlack = 1e-9;

}  // namespace

std::string_view to_string(DirectionSet d) {
  switch (d) {
    case DirectionSet::All:
      return "all";
    case DirectionSet::Eight:
      return "eight";
    case DirectionSet::Four:
      return "four";
  }
  return "all";
}

std::optional<DirectionSet> parse_direction_set(std::string_view text) {
  if (text == "all") return DirectionSet::All;
  if (text == "eight" || text == "8") return DirectionSet::Eight;
  if (text == "four" || text == "4") return DirectionSet::Four;
  return std::nullopt;
}

int direction_count(DirectionSet d) {
  switch (d) {
    case DirectionSet::Eight:
      return 8;
    case DirectionSet::Four:
      return 4;
    case DirectionSet::All:
      break;
  }
  return 0;
}

VelocityCommand direction_vector(DirectionSet d, int index, double speed) {
  static constexpr VelocityCommand kEight[8] = {
      {1, 0}, {kInvSqrt2, kInvSqrt2}, {0, 1}, {-kInvSqrt2, kInvSqrt2},
      {-1, 0}, {-kInvSqrt2, -kInvSqrt2}, {0, -1}, {kInvSqrt2, -kInvSqrt2}};
  const int n = direction_count(d);
  if (n == 0 || index < 0 || index >= n) {
    throw std::invalid_argument("direction index out of range");
  }
  const VelocityCommand& unit = kEight[index * (8 / n)];
  return {unit.vx * speed, unit.vy * speed};
}

int nearest_direction(DirectionSet d, VelocityCommand v) {
  const int n = direction_count(d);
  if (n == 0 || v.is_zero()) {
    throw std::invalid_argument("nearest_direction needs a discrete set and nonzero vector");
  }
  double theta = std::atan2(v.vy, v.vx);
  if (theta < 0.0) theta += 2.0 * std::numbers::pi;
  const double step = 2.0 * std::numbers::pi / n;
  // ceil(t - 0.5) rounds half down, so an exact boundary picks the smaller index.
  const int k = static_cast<int>(std::ceil(theta / step - 0.5));
  return k % n;
}

std::optional<std::string> validate(const InputCondition& c) {
  if (!(c.accuracy >= 0.0 && c.accuracy <= 1.0)) {
    return "accuracy: must lie in [0, 1]";
  }
  if (!(c.period > 0.0) || !std::isfinite(c.period)) {
    return "period: must be positive";
  }
  return std::nullopt;
}

VelocityCommand ideal_command(const PotentialField& goal_field, const OccupancyGrid& grid,
                              WorldPoint x, double speed) {
  return command_from_field(goal_field, grid, x, speed);
}

VelocityCommand ideal_command(const OccupancyGrid& grid, Cell true_goal, WorldPoint x,
                              double speed) {
  return ideal_command(compute_field(grid, true_goal), grid, x, speed);
}

VelocityCommand quantize(VelocityCommand v, DirectionSet directions, double speed) {
  if (directions == DirectionSet::All || v.is_zero()) return v;
  return direction_vector(directions, nearest_direction(directions, v), speed);
}

VelocityCommand corrupt(VelocityCommand v_q, const InputCondition& condition, double speed,
                        Rng& rng) {
  const int n = direction_count(condition.directions);
  if (n == 0) return v_q;
  const double u = uniform01(rng);
  const auto draw = rng();
  if (v_q.is_zero() || u < condition.accuracy) return v_q;
  const int own = nearest_direction(condition.directions, v_q);
  int other = static_cast<int>(draw % static_cast<std::uint64_t>(n - 1));
  if (other >= own) ++other;
  return direction_vector(condition.directions, other, speed);
}

std::optional<CommandRecord> PseudoUser::next_input(double clock,
                                                    const PotentialField& goal_field,
                                                    const OccupancyGrid& grid, WorldPoint x,
                                                    Rng& rng) {
  if (clock + kClockSlack < static_cast<double>(next_boundary_) * condition_.period) {
    return std::nullopt;
  }
  next_boundary_ =
      static_cast<std::int64_t>(std::floor((clock + kClockSlack) / condition_.period)) + 1;
  last_ideal_ = ideal_command(goal_field, grid, x, speed_);
  const VelocityCommand q = quantize(last_ideal_, condition_.directions, speed_);
  return CommandRecord{clock, x, corrupt(q, condition_, speed_, rng)};
}

}  // namespace shctl
