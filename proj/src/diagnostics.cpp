#include "bmeta/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bmeta/errors.hpp"
#include "bmeta/rng.hpp"
#include "bmeta/util.hpp"

namespace bmeta {

double grid_integral(const DensityGrid& g) {
  double s = 0;
  for (std::size_t i = 1; i < g.y.size(); ++i)
    s += 0.5 * (g.f[i] + g.f[i - 1]) * (g.y[i] - g.y[i - 1]);
  return s;
}

double grid_quantile(const DensityGrid& g, double p) {
  if (g.y.size() < 2) throw DegenerateError("grid_quantile: degenerate grid");
  const double mass = grid_integral(g);
  if (!(mass > 0)) throw DegenerateError("grid_quantile: zero mass");
  const double target = p * mass;
  double acc = 0;
  for (std::size_t i = 1; i < g.y.size(); ++i) {
    const double seg = 0.5 * (g.f[i] + g.f[i - 1]) * (g.y[i] - g.y[i - 1]);
    if (acc + seg >= target) {
      const double frac = seg > 0 ? (target - acc) / seg : 0.5;
      return g.y[i - 1] + frac * (g.y[i] - g.y[i - 1]);
    }
    acc += seg;
  }
  return g.y.back();
}

AndersonDarlingResult anderson_darling(std::span<const double> values) {
  const int n = static_cast<int>(values.size());
  if (n < 8)
    throw InsufficientDataError("anderson_darling: need at least 8 values");
  std::vector<double> x(values.begin(), values.end());
  std::sort(x.begin(), x.end());
  const double m = mean_of(x);
  const double sd = sample_sd(x);
  if (!(sd > 0.0))
    throw DegenerateError("anderson_darling: sample has zero spread");

  double a2 = -static_cast<double>(n);
  for (int i = 0; i < n; ++i) {
    double u = norm_cdf((x[static_cast<std::size_t>(i)] - m) / sd);
    double v = norm_cdf((x[static_cast<std::size_t>(n - 1 - i)] - m) / sd);
    u = std::clamp(u, 1e-300, 1.0 - 1e-16);
    v = std::clamp(v, 1e-300, 1.0 - 1e-16);
    a2 -= (2.0 * i + 1.0) / n * (std::log(u) + std::log1p(-v));
  }
  const double a2s = a2 * (1.0 + 0.75 / n + 2.25 / (static_cast<double>(n) * n));
  return {a2, a2s, a2s > 0.752};
}

DensityGrid gaussian_kde(std::span<const double> values,
                         std::optional<double> bandwidth, int grid_points) {
  const int n = static_cast<int>(values.size());
  if (n < 1) throw InsufficientDataError("gaussian_kde: empty sample");
  if (!bandwidth && n < 2)
    throw InsufficientDataError(
        "gaussian_kde: automatic bandwidth needs at least 2 values");
  if (grid_points < 2) throw DomainError("gaussian_kde: grid too small");

  double h;
  if (bandwidth) {
    h = *bandwidth;
    if (!(h > 0.0)) throw DomainError("gaussian_kde: bandwidth must be > 0");
  } else {
    const double sd = sample_sd(values);
    const double iqr =
        quantile_type7(values, 0.75) - quantile_type7(values, 0.25);
    double spread = sd;
    if (iqr > 0.0) spread = std::min(sd, iqr / 1.34);
    if (!(spread > 0.0))
      throw DegenerateError("gaussian_kde: sample has zero spread");
    h = 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
  }

  const auto [mn_it, mx_it] = std::minmax_element(values.begin(), values.end());
  DensityGrid g;
  g.bandwidth = h;
  g.source = "kde";
  g.y = linspace(*mn_it - 3.0 * h, *mx_it + 3.0 * h, grid_points);
  g.f.assign(g.y.size(), 0.0);
  const double norm = 1.0 / (static_cast<double>(n) * h);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < grid_points; ++i) {
    double s = 0;
    for (double v : values) {
      const double z = (g.y[static_cast<std::size_t>(i)] - v) / h;
      s += norm_pdf(z);
    }
    g.f[static_cast<std::size_t>(i)] = s * norm;
  }
  return g;
}

MomentSummary moment_summary(const DensityGrid& g) {
  if (g.y.size() < 2)
    throw DegenerateError("moment_summary: degenerate grid");
  const double mass = grid_integral(g);
  if (!(mass > 0.0)) throw DegenerateError("moment_summary: zero total mass");

  auto integrate = [&](auto&& fn) {
    double s = 0;
    for (std::size_t i = 1; i < g.y.size(); ++i)
      s += 0.5 * (fn(g.y[i]) * g.f[i] + fn(g.y[i - 1]) * g.f[i - 1]) *
           (g.y[i] - g.y[i - 1]);
    return s / mass;
  };

  MomentSummary ms{};
  ms.mean = integrate([](double y) { return y; });
  const double mu = ms.mean;
  ms.variance = integrate([mu](double y) { return (y - mu) * (y - mu); });
  const double sd = std::sqrt(ms.variance);
  ms.skewness =
      integrate([mu](double y) { return (y - mu) * (y - mu) * (y - mu); }) /
      (sd * sd * sd);
  ms.kurtosis = integrate([mu](double y) {
    const double d = (y - mu) * (y - mu);
    return d * d;
  }) / (ms.variance * ms.variance);

  // median via the cumulative trapezoid
  double target = 0.5 * mass, acc = 0;
  ms.median = g.y.back();
  for (std::size_t i = 1; i < g.y.size(); ++i) {
    const double seg = 0.5 * (g.f[i] + g.f[i - 1]) * (g.y[i] - g.y[i - 1]);
    if (acc + seg >= target) {
      const double frac = seg > 0 ? (target - acc) / seg : 0.5;
      ms.median = g.y[i - 1] + frac * (g.y[i] - g.y[i - 1]);
      break;
    }
    acc += seg;
  }
  return ms;
}

MomentSummary moment_summary(std::span<const double> values) {
  if (values.size() < 2)
    throw InsufficientDataError("moment_summary: need at least 2 values");
  const double n = static_cast<double>(values.size());
  const double m = mean_of(values);
  double s2 = 0, s3 = 0, s4 = 0;
  for (double x : values) {
    const double d = x - m;
    s2 += d * d;
    s3 += d * d * d;
    s4 += d * d * d * d;
  }
  // n divisor throughout: these summarize the sample as a distribution
  const double var = s2 / n;
  const double sd = std::sqrt(var);
  MomentSummary ms{};
  ms.mean = m;
  ms.median = quantile_type7(values, 0.5);
  ms.variance = var;
  ms.skewness = var > 0 ? (s3 / n) / (sd * sd * sd) : 0.0;
  ms.kurtosis = var > 0 ? (s4 / n) / (var * var) : 0.0;
  return ms;
}

int count_modes(const DensityGrid& g, double rel_prominence) {
  const int m = static_cast<int>(g.y.size());
  if (m < 3) return m > 0 ? 1 : 0;
  double fmax = 0;
  for (double f : g.f) fmax = std::max(fmax, f);
  if (!(fmax > 0)) return 0;
  const double threshold = rel_prominence * fmax;

  int count = 0;
  for (int i = 1; i + 1 < m; ++i) {
    const double h = g.f[static_cast<std::size_t>(i)];
    if (!(h > g.f[static_cast<std::size_t>(i - 1)]) ||
        !(h >= g.f[static_cast<std::size_t>(i + 1)]))
      continue;
    // prominence: drop to the highest of the two key saddles, where a key
    // saddle is the minimum between this peak and the nearest higher ground
    double left_min = h, right_min = h;
    for (int j = i - 1; j >= 0; --j) {
      const double fj = g.f[static_cast<std::size_t>(j)];
      if (fj > h) break;
      left_min = std::min(left_min, fj);
    }
    for (int j = i + 1; j < m; ++j) {
      const double fj = g.f[static_cast<std::size_t>(j)];
      if (fj > h) break;
      right_min = std::min(right_min, fj);
    }
    const double prominence = h - std::max(left_min, right_min);
    if (prominence >= threshold) ++count;
  }
  // monotone grids: the boundary can hold the single mode
  if (count == 0) {
    const auto mx = std::max_element(g.f.begin(), g.f.end());
    if (mx == g.f.begin() || mx + 1 == g.f.end()) count = 1;
  }
  return count;
}

}  // namespace bmeta
