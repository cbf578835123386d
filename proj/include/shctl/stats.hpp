#ifndef SHCTL_STATS_HPP_
#define SHCTL_STATS_HPP_

#include <optional>
#include <span>

namespace shctl::stats {

double mean(std::span<const double> xs);
// Sample standard deviation (n - 1); 0 for fewer than two values.
double stddev(std::span<const double> xs);

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;  // two-sided
};

// Welch's unequal-variance two-sample t-test. nullopt when either arm has
// fewer than two samples. When both arms have zero variance the p-value is
// the exact-equality outcome: 1 if the means are equal, else 0.
std::optional<WelchResult> welch_test(std::span<const double> a, std::span<const double> b);

// 0 = not significant, 1 = p < 0.05, 2 = p < 0.01, 3 = p < 0.001.
int significance_level(double p);

// Least-squares slope of y on x.
double regression_slope(std::span<const double> x, std::span<const double> y);

}  // namespace shctl::stats

#endif  // SHCTL_STATS_HPP_
