#ifndef BMETA_DIAGNOSTICS_HPP
#define BMETA_DIAGNOSTICS_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bmeta {

struct DensityGrid {
  std::vector<double> y;  // strictly increasing
  std::vector<double> f;  // nonnegative
  double bandwidth = 0;   // 0 when the grid came from a model
  std::string source;
};

double grid_integral(const DensityGrid& g);

// Quantile of the distribution the grid tabulates, by inverting the
// cumulative trapezoid.
double grid_quantile(const DensityGrid& g, double p);

struct AndersonDarlingResult {
  double a2;       // raw statistic, mean/sd estimated from the sample
  double a2_star;  // finite-sample adjusted: a2 * (1 + 0.75/n + 2.25/n^2)
  bool reject_at_05;
};

// Composite test of normality; rejects at the .05 level when the adjusted
// statistic exceeds 0.752.
AndersonDarlingResult anderson_darling(std::span<const double> values);

// Gaussian kernel density on a regular grid spanning [min-3h, max+3h].
// Without an explicit bandwidth, Silverman's rule
// 0.9 * min(sd, IQR/1.34) * n^(-1/5) is used (which needs n >= 2).
DensityGrid gaussian_kde(std::span<const double> values,
                         std::optional<double> bandwidth = {},
                         int grid_points = 512);

struct MomentSummary {
  double mean, median, variance, skewness, kurtosis;  // kurtosis is raw
};

MomentSummary moment_summary(const DensityGrid& g);
MomentSummary moment_summary(std::span<const double> values);

// Local maxima whose prominence reaches rel_prominence * max(f).
int count_modes(const DensityGrid& g, double rel_prominence = 0.05);

}  // namespace bmeta

#endif
