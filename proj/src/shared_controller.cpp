#include "shctl/shared_controller.hpp"

#include <stdexcept>

namespace shctl {

std::string_view to_string(ControlMode mode) {
  return mode == ControlMode::Shared ? "shared" : "direct";
}

std::optional<ControlMode> parse_control_mode(std::string_view text) {
  if (text == "shared") return ControlMode::Shared;
  if (text == "direct") return ControlMode::Direct;
  return std::nullopt;
}

VelocityCommand blend(VelocityCommand v_user, VelocityCommand v_auto, double c) {
  if (!(c >= 0.0 && c <= 1.0)) {
    throw std::invalid_argument("blend weight must lie in [0, 1]");
  }
  return {c * v_auto.vx + (1.0 - c) * v_user.vx, c * v_auto.vy + (1.0 - c) * v_user.vy};
}

ControlOutput control_tick(WorldPoint position, const HeldCommand& held,
                           const GoalEstimate* estimate, ControlMode mode, Autonomy& autonomy,
                           double speed) {
  if (mode == ControlMode::Direct || estimate == nullptr) {
    return {held.value, {}, 0.0};
  }
  VelocityCommand v_auto;
  try {
    v_auto = autonomy.command(estimate->goal, position, speed);
  } catch (const UnreachableGoal&) {
    return {held.value, {}, 0.0};
  }
  return {blend(held.value, v_auto, estimate->confidence), v_auto, estimate->confidence};
}

}  // namespace shctl
