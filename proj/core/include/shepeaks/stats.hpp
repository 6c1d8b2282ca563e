#pragma once

#include <cstddef>
#include <span>

namespace shepeaks::stats {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

/// Ordinary least squares y = intercept + slope * x. Needs at least 2 points
/// with distinct x; the slope standard error needs at least 3.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

double mean(std::span<const double> v);

/// Unbiased sample variance; 0 for fewer than two values.
double variance(std::span<const double> v);

/// Standard error of the mean.
double standard_error(std::span<const double> v);

/// Linearly interpolated quantile (Hyndman-Fan type 7). q in [0, 1].
double quantile(std::span<const double> v, double q);

/// P{X >= x} for a standard normal X.
double normal_upper_tail(double x);

}  // namespace shepeaks::stats
