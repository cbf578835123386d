#include "shctl/teleop/session.hpp"

#include <algorithm>
#include <cmath>

namespace shctl::teleop {

namespace {

constexpr double kTimeSlack = 1e-9;

}  // namespace

std::string_view to_string(SessionStatus s) {
  switch (s) {
    case SessionStatus::Running: return "running";
    case SessionStatus::Succeeded: return "succeeded";
    case SessionStatus::Failed: return "failed";
  }
  return "failed";
}

std::string_view to_string(InputStatus s) {
  switch (s) {
    case InputStatus::Accepted: return "accepted";
    case InputStatus::Limited: return "limited";
    case InputStatus::Rejected: return "rejected";
  }
  return "rejected";
}

Heatmap downsample(const std::vector<double>& values, int width, int height, int max_side) {
  Heatmap h;
  h.block = std::max(1, (std::max(width, height) + max_side - 1) / max_side);
  h.width = (width + h.block - 1) / h.block;
  h.height = (height + h.block - 1) / h.block;
  std::vector<double> sums(static_cast<std::size_t>(h.width) * static_cast<std::size_t>(h.height));
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      sums[static_cast<std::size_t>(y / h.block) * static_cast<std::size_t>(h.width) +
           static_cast<std::size_t>(x / h.block)] +=
          values[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                 static_cast<std::size_t>(x)];
    }
  }
  double total = 0.0;
  for (double s : sums) total += s;
  h.values.resize(sums.size());
  for (std::size_t i = 0; i < sums.size(); ++i) {
    h.values[i] = static_cast<float>(total > 0.0 ? sums[i] / total : 0.0);
  }
  return h;
}

Session::Session(std::shared_ptr<const OccupancyGrid> grid, SessionConfig config)
    : grid_(std::move(grid)),
      config_(config),
      goal_field_([&] {
        if (auto err = validate(config_.condition)) throw TrialConfigError(*err);
        if (!grid_->is_free(config_.goal)) throw TrialConfigError("goal: not a free cell");
        return compute_field(*grid_, config_.goal);
      }()),
      rng_(config_.seed),
      estimator_(*grid_, config_.params.estimator()),
      autonomy_(*grid_, config_.params.delta) {
  const auto start = world_to_cell(*grid_, config_.start);
  if (!start || !grid_->is_free(*start)) throw TrialConfigError("start: not in a free cell");
  if (!goal_field_.reachable(*start)) throw TrialConfigError("goal: unreachable from start");
  if (!(config_.params.dt > 0.0) || !(config_.params.timeout > 0.0) ||
      !(config_.params.speed > 0.0)) {
    throw TrialConfigError("dt, speed and timeout must be positive");
  }
  state_.position = config_.start;
  max_steps_ = static_cast<std::int64_t>(
      std::ceil(config_.params.timeout / config_.params.dt - kTimeSlack));
  if (distance(state_.position, cell_to_world(*grid_, config_.goal)) <=
      config_.params.goal_radius) {
    finish(SessionStatus::Succeeded, {});
  }
}

InputOutcome Session::submit(const OperatorInput& input) {
  InputOutcome out;
  if (terminal()) {
    out.message = "session is " + std::string(to_string(status_));
    return out;
  }
  const DirectionSet set = config_.condition.directions;
  const double speed = config_.params.speed;
  if (const int* index = std::get_if<int>(&input)) {
    const int n = direction_count(set);
    if (n == 0) {
      out.message = "direction: this session takes analog vectors";
      return out;
    }
    if (*index < 0 || *index >= n) {
      out.message = "direction: index must lie in [0, " + std::to_string(n - 1) + "]";
      return out;
    }
    out.sent = direction_vector(set, *index, speed);
  } else {
    const VelocityCommand v = std::get<VelocityCommand>(input);
    if (!std::isfinite(v.vx) || !std::isfinite(v.vy) || v.is_zero()) {
      out.message = "vector: must be finite and nonzero";
      return out;
    }
    out.sent = set == DirectionSet::All ? (speed / v.norm()) * v : quantize(v, set, speed);
  }

  const double now = state_.clock;
  if (last_accepted_) {
    const double wait = *last_accepted_ + config_.condition.period - now;
    if (wait > kTimeSlack) {
      out.status = InputStatus::Limited;
      out.retry_after = wait;
      return out;
    }
  }
  last_accepted_ = now;
  const VelocityCommand applied = corrupt(out.sent, config_.condition, speed, rng_);
  held_ = {applied, now};
  if (config_.condition.mode == ControlMode::Shared) {
    estimator_.observe({now, state_.position, applied});
  }
  log_.push_back({now, state_.position, out.sent, applied});
  out.status = InputStatus::Accepted;
  return out;
}

void Session::tick() {
  if (terminal()) return;
  if (detached_at_ && state_.clock - *detached_at_ >= config_.grace_period - kTimeSlack) {
    finish(SessionStatus::Failed, "connection lost");
    return;
  }
  const ControlOutput out = control_tick(
      state_.position, held_, estimator_.has_estimate() ? &estimator_.estimate() : nullptr,
      config_.condition.mode, autonomy_, config_.params.speed);
  last_confidence_ = out.confidence;
  last_command_ = out.command;
  state_ = step(state_, out.command, config_.params.dt, *grid_);
  if (distance(state_.position, cell_to_world(*grid_, config_.goal)) <=
      config_.params.goal_radius) {
    finish(SessionStatus::Succeeded, {});
  } else if (state_.steps >= max_steps_) {
    finish(SessionStatus::Failed, "timeout");
  }
}

void Session::detach() {
  if (!detached_at_) detached_at_ = state_.clock;
}

void Session::attach() { detached_at_.reset(); }

void Session::finish(SessionStatus status, std::string reason) {
  status_ = status;
  failure_reason_ = std::move(reason);
}

Frame Session::frame() const {
  Frame f;
  f.clock = state_.clock;
  f.position = state_.position;
  f.collisions = state_.collisions;
  f.path_length = state_.path_length;
  f.confidence = last_confidence_;
  f.command = last_command_;
  f.status = status_;
  if (estimator_.has_estimate()) {
    f.estimated_goal = estimator_.estimate().goal;
    f.heatmap = downsample(estimator_.posterior().values(), grid_->width(), grid_->height());
  } else {
    // No command yet: every free cell is equally likely.
    std::vector<double> uniform(grid_->size());
    for (std::size_t i = 0; i < uniform.size(); ++i) {
      uniform[i] = grid_->is_free_index(i) ? 1.0 : 0.0;
    }
    f.heatmap = downsample(uniform, grid_->width(), grid_->height());
  }
  return f;
}

TrialResult Session::result() const {
  TrialResult r;
  r.reached = status_ == SessionStatus::Succeeded;
  r.collisions = state_.collisions;
  r.success = r.reached && state_.collisions == 0;
  r.elapsed = static_cast<double>(state_.steps) * config_.params.dt;
  r.path_length = state_.path_length;
  r.condition = config_.condition;
  r.seed = config_.seed;
  return r;
}

}  // namespace shctl::teleop
