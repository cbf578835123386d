#ifndef SHCTL_TELEOP_SESSION_HPP_
#define SHCTL_TELEOP_SESSION_HPP_

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "shctl/autonomy.hpp"
#include "shctl/simulator.hpp"

namespace shctl::teleop {

enum class SessionStatus { Running, Succeeded, Failed };
std::string_view to_string(SessionStatus s);

struct SessionConfig {
  WorldPoint start{};
  Cell goal{};
  InputCondition condition{};
  std::uint64_t seed = 1;
  SimParams params{};         // dt is the tick period
  double grace_period = 30.0; // s a detached session keeps running
};

// What the operator pressed: a direction of the session's set, or an analog
// vector that is snapped to the set.
using OperatorInput = std::variant<int, VelocityCommand>;

enum class InputStatus { Accepted, Limited, Rejected };
std::string_view to_string(InputStatus s);

struct InputOutcome {
  InputStatus status = InputStatus::Rejected;
  VelocityCommand sent{};     // after snapping to the set; never the corrupted one
  double retry_after = 0.0;   // s until the next input is accepted, when limited
  std::string message;        // reason, when rejected
};

struct InputLogEntry {
  double time = 0.0;
  WorldPoint position{};
  VelocityCommand sent{};
  VelocityCommand applied{};
};

// Posterior block-summed down to at most max_side x max_side, renormalized.
struct Heatmap {
  int width = 0;
  int height = 0;
  int block = 1;  // map cells per heatmap cell along each axis
  std::vector<float> values;
};
Heatmap downsample(const std::vector<double>& values, int width, int height, int max_side = 64);

struct Frame {
  double clock = 0.0;
  WorldPoint position{};
  int collisions = 0;
  double path_length = 0.0;
  double confidence = 0.0;
  VelocityCommand command{};         // applied this tick
  std::optional<Cell> estimated_goal;
  Heatmap heatmap;
  SessionStatus status = SessionStatus::Running;
};

// One live trial. Time only moves through tick(), so the class is fully
// deterministic for a given sequence of submits between ticks.
class Session {
 public:
  // Throws TrialConfigError on an invalid condition, start or goal.
  Session(std::shared_ptr<const OccupancyGrid> grid, SessionConfig config);

  // Applies the rate limit, snaps to the direction set, corrupts with the
  // session rng and feeds the estimator. Input takes effect on the next tick.
  InputOutcome submit(const OperatorInput& input);

  // Advances the simulation one dt.
  void tick();

  // Starts or clears the grace countdown for a dropped connection.
  void detach();
  void attach();
  bool attached() const { return !detached_at_.has_value(); }

  SessionStatus status() const { return status_; }
  bool terminal() const { return status_ != SessionStatus::Running; }
  double clock() const { return state_.clock; }
  const SimState& state() const { return state_; }
  const SessionConfig& config() const { return config_; }
  const OccupancyGrid& grid() const { return *grid_; }
  const std::vector<InputLogEntry>& log() const { return log_; }
  std::string_view failure_reason() const { return failure_reason_; }

  Frame frame() const;
  TrialResult result() const;

 private:
  void finish(SessionStatus status, std::string reason);

  std::shared_ptr<const OccupancyGrid> grid_;
  SessionConfig config_;
  PotentialField goal_field_;
  Rng rng_;
  GoalEstimator estimator_;
  Autonomy autonomy_;
  HeldCommand held_;
  SimState state_;
  std::optional<double> last_accepted_;
  std::optional<double> detached_at_;
  std::int64_t max_steps_ = 0;
  double last_confidence_ = 0.0;
  VelocityCommand last_command_{};
  SessionStatus status_ = SessionStatus::Running;
  std::string failure_reason_;
  std::vector<InputLogEntry> log_;
};

}  // namespace shctl::teleop

#endif  // SHCTL_TELEOP_SESSION_HPP_
