#ifndef SHCTL_SHARED_CONTROLLER_HPP_
#define SHCTL_SHARED_CONTROLLER_HPP_

#include <optional>
#include <string_view>

#include "shctl/autonomy.hpp"
#include "shctl/goal_estimator.hpp"

namespace shctl {

enum class ControlMode { Shared, Direct };

std::string_view to_string(ControlMode mode);
std::optional<ControlMode> parse_control_mode(std::string_view text);

// Last operator command, held until the next one arrives.
struct HeldCommand {
  VelocityCommand value{};
  double issued_at = 0.0;
};

// c * v_auto + (1 - c) * v_user, componentwise, no renormalization.
VelocityCommand blend(VelocityCommand v_user, VelocityCommand v_auto, double c);

struct ControlOutput {
  VelocityCommand command{};
  VelocityCommand autonomous{};
  double confidence = 0.0;  // weight actually applied this tick
};

// One control-loop tick. Direct mode passes the held command through. Shared
// mode blends it with the autonomy command toward the estimated goal; with
// no estimate yet, or an unreachable goal, it degrades to direct for the tick.
ControlOutput control_tick(WorldPoint position, const HeldCommand& held,
                           const GoalEstimate* estimate, ControlMode mode, Autonomy& autonomy,
                           double speed);

}  // namespace shctl

#endif  // SHCTL_SHARED_CONTROLLER_HPP_
