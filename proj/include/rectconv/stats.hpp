#pragma once

#include <span>
#include <vector>

namespace rectconv {

/// Linear-interpolation sample quantile (Hyndman-Fan type 7), q in [0, 1].
double percentile(std::vector<double> sample, double q);
double median(std::vector<double> sample);
double mean(std::span<const double> sample);
double variance(std::span<const double> sample);

/// sup_x |F_a(x) - F_b(x)| between two empirical CDFs.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};
/// Ordinary least squares y = slope * x + intercept.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace rectconv
