#pragma once

#include <span>
#include <vector>

namespace vfog::stats {

inline constexpr double kZ95 = 1.959963984540054;

double mean(std::span<const double> xs);
// Sample standard deviation (n - 1 denominator); 0 for fewer than two points.
double stddev(std::span<const double> xs);
double standard_error(std::span<const double> xs);

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

// Normal-approximation confidence interval for the mean.
Interval mean_ci(std::span<const double> xs, double z = kZ95);

// Upper confidence bound of mean(a - b) for paired samples.
double paired_upper(std::span<const double> a, std::span<const double> b, double z = kZ95);

}  // namespace vfog::stats
