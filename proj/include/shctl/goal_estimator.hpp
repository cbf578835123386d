#ifndef SHCTL_GOAL_ESTIMATOR_HPP_
#define SHCTL_GOAL_ESTIMATOR_HPP_

#include <cstddef>
#include <deque>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "shctl/gridmap.hpp"
#include "shctl/kernels.hpp"

namespace shctl {

class EstimatorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EstimatorParams {
  std::size_t window = 10;  // N; the history keeps N+1 records
  double threshold = 0.95;  // T
  double beta = 4.0;
  double speed = 0.3;       // s, m/s
  double delta = 0.0;       // central-difference step, <= 0 means one cell
  kernels::Backend backend = kernels::Backend::OpenMP;
};

// One operator command and where the robot was when it was issued.
struct CommandRecord {
  double time = 0.0;
  WorldPoint position{};
  VelocityCommand velocity{};
};

// Sliding window of the most recent N+1 commands, oldest first.
class CommandHistory {
 public:
  explicit CommandHistory(std::size_t n = 10) : n_(n) {}

  // Appends; evicts the oldest record once N+1 are held. Times must strictly
  // increase. Returns true if a record was evicted.
  bool push(const CommandRecord& record);
  void clear() { records_.clear(); }

  std::size_t capacity() const { return n_ + 1; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const std::deque<CommandRecord>& records() const { return records_; }

 private:
  std::size_t n_;
  std::deque<CommandRecord> records_;
};

// Normalized goal distribution over map cells; zero on Occupied and
// unreachable cells.
class GoalPosterior {
 public:
  GoalPosterior(int width, int height, std::vector<double> probabilities)
      : width_(width), height_(height), p_(std::move(probabilities)) {}

  int width() const { return width_; }
  int height() const { return height_; }
  double probability(Cell c) const {
    return p_[static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width_) +
              static_cast<std::size_t>(c.x)];
  }
  const std::vector<double>& values() const { return p_; }
  // Lowest row-major index among the maxima.
  Cell argmax() const;

 private:
  int width_;
  int height_;
  std::vector<double> p_;
};

struct GoalEstimate {
  std::vector<Cell> candidates;  // G, row-major order
  Cell goal{};                   // g_t
  double p_max = 0.0;
  double p_min = 0.0;
  double confidence = 0.0;       // c(g_t); 0 until confidence() is applied
};

// Single-command likelihood for every cell as a goal, via the five
// sample-sourced fields.
std::vector<double> step_likelihood(const OccupancyGrid& grid, WorldPoint x,
                                    VelocityCommand v_user, double speed, double delta = 0.0,
                                    kernels::Backend backend = kernels::Backend::OpenMP);

// Same quantity computed the slow way: one potential field per goal cell,
// read through desired_velocity. Kept as the reference path.
std::vector<double> step_likelihood_reference(const OccupancyGrid& grid, WorldPoint x,
                                              VelocityCommand v_user, double speed,
                                              double delta = 0.0);

// Normalized product of per-record likelihood grids (log space). Throws
// EstimatorError when every cell has zero product.
GoalPosterior posterior_from_likelihoods(const OccupancyGrid& grid,
                                         std::span<const std::vector<double>* const> grids,
                                         kernels::Backend backend = kernels::Backend::OpenMP);

// Recomputes each record's likelihood at its own position, then combines.
GoalPosterior update_posterior(const OccupancyGrid& grid, const CommandHistory& history,
                               const EstimatorParams& params);

// Candidate set {g : p(g) > T (p_max - p_min)} over Free cells, and the
// candidate nearest x (ties: lowest row-major index).
GoalEstimate select_goal(const GoalPosterior& posterior, const OccupancyGrid& grid,
                         WorldPoint x, double threshold);

// min(1, beta * p(g_t) / sum_{g in G} p(g)).
double confidence(const GoalPosterior& posterior, const GoalEstimate& estimate, double beta);

// select_goal + confidence.
GoalEstimate estimate_goal(const GoalPosterior& posterior, const OccupancyGrid& grid,
                           WorldPoint x, const EstimatorParams& params);

// Incremental estimator for a control loop: keeps the history window and
// each retained record's likelihood grid, so a new command costs one
// likelihood evaluation.
class GoalEstimator {
 public:
  GoalEstimator(const OccupancyGrid& grid, EstimatorParams params);

  // Adds a command and re-estimates at the command's position.
  const GoalEstimate& observe(const CommandRecord& record);
  void reset();

  bool has_estimate() const { return posterior_.has_value(); }
  const GoalEstimate& estimate() const { return estimate_; }
  const GoalPosterior& posterior() const;
  const CommandHistory& history() const { return history_; }
  const EstimatorParams& params() const { return params_; }

 private:
  const OccupancyGrid* grid_;
  EstimatorParams params_;
  CommandHistory history_;
  std::deque<std::vector<double>> likelihoods_;
  std::optional<GoalPosterior> posterior_;
  GoalEstimate estimate_;
};

// Row-major CSV of the posterior, row 0 first.
void write_posterior_csv(const GoalPosterior& posterior, std::ostream& out);

}  // namespace shctl

#endif  // SHCTL_GOAL_ESTIMATOR_HPP_
