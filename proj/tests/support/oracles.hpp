#ifndef BMETA_TESTS_ORACLES_HPP
#define BMETA_TESTS_ORACLES_HPP

// Independent numerical oracles used to freeze expected values. Everything
// here is deliberately brute force and shares no code path with the
// implementations it checks.

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace oracle {

// Composite trapezoid integration of fn over [lo, hi].
inline double trapezoid(const std::function<double(double)>& fn, double lo,
                        double hi, int k = 20001) {
  const double h = (hi - lo) / (k - 1);
  double s = 0.5 * (fn(lo) + fn(hi));
  for (int i = 1; i + 1 < k; ++i) s += fn(lo + i * h);
  return s * h;
}

// Normalized CDF table of an unnormalized density on (lo, hi).
struct CdfTable {
  std::vector<double> x, c;
};

inline CdfTable cdf_table(const std::function<double(double)>& density,
                          double lo, double hi, int k = 20001) {
  CdfTable t;
  t.x.resize(static_cast<std::size_t>(k));
  t.c.resize(static_cast<std::size_t>(k));
  const double h = (hi - lo) / (k - 1);
  double acc = 0;
  double prev = density(lo);
  t.x[0] = lo;
  t.c[0] = 0;
  for (int i = 1; i < k; ++i) {
    const double xi = lo + i * h;
    const double cur = density(xi);
    acc += 0.5 * (prev + cur) * h;
    t.x[static_cast<std::size_t>(i)] = xi;
    t.c[static_cast<std::size_t>(i)] = acc;
    prev = cur;
  }
  for (double& v : t.c) v /= acc;
  return t;
}

inline double cdf_at(const CdfTable& t, double x) {
  auto it = std::lower_bound(t.x.begin(), t.x.end(), x);
  if (it == t.x.begin()) return 0;
  if (it == t.x.end()) return 1;
  const auto i = static_cast<std::size_t>(it - t.x.begin());
  const double w = (x - t.x[i - 1]) / (t.x[i] - t.x[i - 1]);
  return t.c[i - 1] + w * (t.c[i] - t.c[i - 1]);
}

inline double inverse_cdf(const CdfTable& t, double u) {
  auto it = std::lower_bound(t.c.begin(), t.c.end(), u);
  if (it == t.c.begin()) return t.x.front();
  if (it == t.c.end()) return t.x.back();
  const auto i = static_cast<std::size_t>(it - t.c.begin());
  const double denom = t.c[i] - t.c[i - 1];
  const double w = denom > 0 ? (u - t.c[i - 1]) / denom : 0.5;
  return t.x[i - 1] + w * (t.x[i] - t.x[i - 1]);
}

inline double mean_under(const CdfTable& t,
                         const std::function<double(double)>& g) {
  // expectation of g under the tabulated distribution via the derivative
  double acc = 0;
  for (std::size_t i = 1; i < t.x.size(); ++i) {
    const double p = t.c[i] - t.c[i - 1];
    acc += p * 0.5 * (g(t.x[i]) + g(t.x[i - 1]));
  }
  return acc;
}

// Kolmogorov-Smirnov distance between a sample and a reference CDF.
inline double ks_distance(std::vector<double> sample,
                          const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(f - static_cast<double>(i + 1) / n));
  }
  return d;
}

inline double sample_mean(std::span<const double> v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double sample_var(std::span<const double> v) {
  const double m = sample_mean(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace oracle

#endif
