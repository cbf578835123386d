#include "shctl/stats.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

namespace shctl::stats {

double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double stddev(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

std::optional<WelchResult> welch_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) return std::nullopt;
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double ma = mean(a), mb = mean(b);
  const double va = stddev(a) * stddev(a) / na;
  const double vb = stddev(b) * stddev(b) / nb;
  const double se2 = va + vb;
  if (se2 == 0.0) {
    return WelchResult{0.0, na + nb - 2.0, ma == mb ? 1.0 : 0.0};
  }
  WelchResult r;
  r.t = (ma - mb) / std::sqrt(se2);
  r.df = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  boost::math::students_t dist(r.df);
  r.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(r.t)));
  if (r.p > 1.0) r.p = 1.0;
  return r;
}

int significance_level(double p) {
  if (p < 0.001) return 3;
  if (p < 0.01) return 2;
  if (p < 0.05) return 1;
  return 0;
}

double regression_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("regression needs two or more paired points");
  }
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw std::invalid_argument("regression needs distinct x values");
  return sxy / sxx;
}

}  // namespace shctl::stats
