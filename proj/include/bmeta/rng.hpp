#ifndef BMETA_RNG_HPP
#define BMETA_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <span>

namespace bmeta {

// Standard normal density, log density, and distribution function.
inline double norm_pdf(double z) {
  return 0.3989422804014326779 * std::exp(-0.5 * z * z);
}

inline double norm_logpdf(double y, double mean, double var) {
  const double d = y - mean;
  return -0.5 * (d * d / var + std::log(var)) - 0.9189385332046727418;
}

inline double norm_pdf(double y, double mean, double var) {
  return std::exp(norm_logpdf(y, mean, var));
}

inline double norm_cdf(double z) { return 0.5 * std::erfc(-z * M_SQRT1_2); }

// Inverse standard normal distribution function (Wichura's PPND16),
// accurate to ~1e-15 over (0,1).
double norm_inv(double p);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Uniform on (0,1); never returns an exact endpoint.
  double uniform() {
    double u;
    do {
      u = unif_(eng_);
    } while (u <= 0.0 || u >= 1.0);
    return u;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() { return normal_(eng_); }
  double normal(double mean, double sd) { return mean + sd * normal(); }

  // Gamma with shape/rate parameterization.
  double gamma(double shape, double rate) {
    std::gamma_distribution<double> g(shape, 1.0 / rate);
    return g(eng_);
  }

  double exponential() { return -std::log(uniform()); }

  bool bernoulli(double p) { return uniform() < p; }

  // Index draw from unnormalized log weights.
  int categorical_logits(std::span<const double> logw);

  // Normal(mean, sd^2) restricted to (lo, hi], via inverse-CDF on whichever
  // tail keeps full precision. Intervals further than ~37 sd out underflow;
  // callers guard those separately.
  double trunc_normal(double mean, double sd, double lo, double hi);

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
  std::uniform_real_distribution<double> unif_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

// One slice-sampling update for a log density on the open interval (lo, hi).
// The initial bracket is the whole support, shrunk toward x0 (Neal 2003,
// "shrinkage" procedure); no step-out is needed on a bounded domain.
template <class LogF>
double slice_sample_bounded(double x0, LogF&& logf, double lo, double hi,
                            Rng& rng, int max_shrink = 400) {
  const double ly = logf(x0) - rng.exponential();
  double l = lo, r = hi;
  for (int it = 0; it < max_shrink; ++it) {
    const double x1 = rng.uniform(l, r);
    if (logf(x1) > ly) return x1;
    if (x1 < x0)
      l = x1;
    else
      r = x1;
  }
  return x0;  // bracket collapsed to numerical width; keep the current point
}

// Slice update on (lo, +inf) with step-out of width w.
template <class LogF>
double slice_sample_stepout(double x0, LogF&& logf, double lo, double w,
                            Rng& rng, int max_steps = 64) {
  const double ly = logf(x0) - rng.exponential();
  double l = x0 - w * rng.uniform();
  double r = l + w;
  if (l < lo) l = lo;
  for (int it = 0; it < max_steps && l > lo && logf(l) > ly; ++it) l -= w;
  if (l < lo) l = lo;
  for (int it = 0; it < max_steps && logf(r) > ly; ++it) r += w;
  for (int it = 0; it < 400; ++it) {
    const double x1 = rng.uniform(l, r);
    if (logf(x1) > ly) return x1;
    if (x1 < x0)
      l = x1;
    else
      r = x1;
  }
  return x0;
}

}  // namespace bmeta

#endif
