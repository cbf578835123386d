#include "shctl/goal_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace shctl {

bool CommandHistory::push(const CommandRecord& record) {
  if (!records_.empty() && !(record.time > records_.back().time)) {
    throw EstimatorError("command times must strictly increase");
  }
  records_.push_back(record);
  if (records_.size() > capacity()) {
    records_.pop_front();
    return true;
  }
  return false;
}

Cell GoalPosterior::argmax() const {
  const auto it = std::max_element(p_.begin(), p_.end());
  const auto i = static_cast<std::size_t>(it - p_.begin());
  return {static_cast<int>(i % static_cast<std::size_t>(width_)),
          static_cast<int>(i / static_cast<std::size_t>(width_))};
}

std::vector<double> step_likelihood(const OccupancyGrid& grid, WorldPoint x,
                                    VelocityCommand v_user, double speed, double delta,
                                    kernels::Backend backend) {
  const auto fields = kernels::sample_fields(grid, x, delta, backend);
  std::vector<double> out(grid.size());
  kernels::likelihood_grid(grid, fields, v_user, speed, delta, out, backend);
  return out;
}

std::vector<double> step_likelihood_reference(const OccupancyGrid& grid, WorldPoint x,
                                              VelocityCommand v_user, double speed,
                                              double delta) {
  const auto xc = world_to_cell(grid, x);
  if (!xc || !grid.is_free(*xc)) {
    throw FieldError("likelihood requested at a position outside free space");
  }
  std::vector<double> out(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!grid.is_free_index(i)) continue;
    const PotentialField field = compute_field(grid, grid.cell_at(i));
    if (!field.reachable(*xc)) continue;
    const auto v = desired_velocity(field, grid, x, speed, delta).value_or(VelocityCommand{});
    out[i] = std::exp(-std::hypot(v.vx - v_user.vx, v.vy - v_user.vy));
  }
  return out;
}

GoalPosterior posterior_from_likelihoods(const OccupancyGrid& grid,
                                         std::span<const std::vector<double>* const> grids,
                                         kernels::Backend backend) {
  if (grids.empty()) {
    throw EstimatorError("posterior needs at least one command");
  }
  std::vector<double> log_sum(grid.size());
  kernels::log_product(grids, log_sum, backend);
  std::vector<double> p(grid.size());
  if (!kernels::normalize_from_log(log_sum, p, backend)) {
    throw EstimatorError("no feasible goal: every cell has zero likelihood");
  }
  return GoalPosterior(grid.width(), grid.height(), std::move(p));
}

GoalPosterior update_posterior(const OccupancyGrid& grid, const CommandHistory& history,
                               const EstimatorParams& params) {
  if (history.empty()) {
    throw EstimatorError("posterior needs at least one command");
  }
  std::vector<std::vector<double>> grids;
  grids.reserve(history.size());
  for (const CommandRecord& r : history.records()) {
    grids.push_back(step_likelihood(grid, r.position, r.velocity, params.speed, params.delta,
                                    params.backend));
  }
  std::vector<const std::vector<double>*> ptrs;
  for (const auto& g : grids) ptrs.push_back(&g);
  return posterior_from_likelihoods(grid, ptrs, params.backend);
}

GoalEstimate select_goal(const GoalPosterior& posterior, const OccupancyGrid& grid,
                         WorldPoint x, double threshold) {
  const auto& p = posterior.values();
  GoalEstimate est;
  est.p_max = -1.0;
  est.p_min = 2.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!grid.is_free_index(i)) continue;
    est.p_max = std::max(est.p_max, p[i]);
    est.p_min = std::min(est.p_min, p[i]);
  }
  const double cut = threshold * (est.p_max - est.p_min);
  double best = kUnreachable;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!grid.is_free_index(i) || !(p[i] > cut)) continue;
    const Cell c = grid.cell_at(i);
    est.candidates.push_back(c);
    const double d = distance(x, cell_to_world(grid, c));
    if (d < best) {
      best = d;
      est.goal = c;
    }
  }
  if (est.candidates.empty()) {
    throw EstimatorError("empty candidate set");
  }
  return est;
}

double confidence(const GoalPosterior& posterior, const GoalEstimate& estimate, double beta) {
  double mass = 0.0;
  for (const Cell& c : estimate.candidates) mass += posterior.probability(c);
  if (!(mass > 0.0)) return 0.0;
  const double c = beta * posterior.probability(estimate.goal) / mass;
  return std::clamp(c, 0.0, 1.0);
}

GoalEstimate estimate_goal(const GoalPosterior& posterior, const OccupancyGrid& grid,
                           WorldPoint x, const EstimatorParams& params) {
  GoalEstimate est = select_goal(posterior, grid, x, params.threshold);
  est.confidence = confidence(posterior, est, params.beta);
  return est;
}

GoalEstimator::GoalEstimator(const OccupancyGrid& grid, EstimatorParams params)
    : grid_(&grid), params_(params), history_(params.window) {}

const GoalEstimate& GoalEstimator::observe(const CommandRecord& record) {
  auto lik = step_likelihood(*grid_, record.position, record.velocity, params_.speed,
                             params_.delta, params_.backend);
  if (history_.push(record)) likelihoods_.pop_front();
  likelihoods_.push_back(std::move(lik));

  std::vector<const std::vector<double>*> ptrs;
  ptrs.reserve(likelihoods_.size());
  for (const auto& g : likelihoods_) ptrs.push_back(&g);
  posterior_ = posterior_from_likelihoods(*grid_, ptrs, params_.backend);
  estimate_ = estimate_goal(*posterior_, *grid_, record.position, params_);
  return estimate_;
}

void GoalEstimator::reset() {
  history_.clear();
  likelihoods_.clear();
  posterior_.reset();
  estimate_ = GoalEstimate{};
}

const GoalPosterior& GoalEstimator::posterior() const {
  if (!posterior_) throw EstimatorError("no command observed yet");
  return *posterior_;
}

void write_posterior_csv(const GoalPosterior& posterior, std::ostream& out) {
  const auto old_precision = out.precision(17);
  for (int y = 0; y < posterior.height(); ++y) {
    for (int x = 0; x < posterior.width(); ++x) {
      if (x) out << ',';
      out << posterior.probability({x, y});
    }
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace shctl
