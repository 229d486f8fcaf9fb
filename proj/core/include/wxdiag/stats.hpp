#pragma once

#include <span>
#include <vector>

namespace wxdiag {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Ordinary (or weighted, when `weights` is non-empty) least-squares line
/// y = slope*x + intercept. Requires at least two distinct x with positive
/// weight; r2 is 1 when y has no spread about its weighted mean.
LinearFit fit_line(std::span<const double> x, std::span<const double> y,
                   std::span<const double> weights = {});

double mean(std::span<const double> values);

/// Sample standard deviation (n-1 denominator).
double sample_sd(std::span<const double> values);

/// Plain Pearson correlation; NaN when either input has zero variance.
double pearson(std::span<const double> a, std::span<const double> b);

/// Midranks with rank 1 assigned to the largest value when `descending`,
/// the smallest otherwise. Tied values share the average of their positions.
std::vector<double> midranks(std::span<const double> values, bool descending);

}  // namespace wxdiag
