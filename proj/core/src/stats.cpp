#include "vfog/stats.hpp"

#include <cmath>
#include <numeric>

#include "vfog/error.hpp"

namespace vfog::stats {

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

double standard_error(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  return stddev(xs) / std::sqrt(static_cast<double>(xs.size()));
}

Interval mean_ci(std::span<const double> xs, double z) {
  const double m = mean(xs);
  const double h = z * standard_error(xs);
  return {m - h, m + h};
}

double paired_upper(std::span<const double> a, std::span<const double> b, double z) {
  if (a.size() != b.size()) throw InvalidParameter("paired samples differ in length");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return mean(d) + z * standard_error(d);
}

}  // namespace vfog::stats
