#include <cmath>
#include <random>
#include <vector>

#include "bmeta/diagnostics.hpp"
#include "bmeta/errors.hpp"
#include "bmeta/rng.hpp"
#include "bmeta/util.hpp"
#include "doctest.h"

using namespace bmeta;

TEST_CASE("anderson-darling guards") {
  std::vector<double> tiny = {1, 2, 3};
  CHECK_THROWS_AS(anderson_darling(tiny), InsufficientDataError);
  std::vector<double> flat(10, 2.0);
  CHECK_THROWS_AS(anderson_darling(flat), DegenerateError);
}

TEST_CASE("anderson-darling holds its size on normal samples") {
  // Monte Carlo check of the alpha=.05 decision over seeded replications
  int rejects = 0;
  const int reps = 200;
  for (int r = 0; r < reps; ++r) {
    Rng rng(1000 + static_cast<std::uint64_t>(r));
    std::vector<double> x(1000);
    for (auto& v : x) v = rng.normal(0.3, 1.7);
    if (anderson_darling(x).reject_at_05) ++rejects;
  }
  const double rate = rejects / static_cast<double>(reps);
  CHECK(rate < 0.10);  // >= 90% of replications accept
  CHECK(rate > 0.005);
}

TEST_CASE("anderson-darling rejects a separated mixture") {
  int rejects = 0;
  const int reps = 100;
  for (int r = 0; r < reps; ++r) {
    Rng rng(77 + static_cast<std::uint64_t>(r));
    std::vector<double> x(1000);
    for (auto& v : x)
      v = rng.bernoulli(0.5) ? rng.normal(-2.0, 1.0) : rng.normal(2.0, 1.0);
    if (anderson_darling(x).reject_at_05) ++rejects;
  }
  CHECK(rejects == reps);  // >= 99% power at this separation
}

TEST_CASE("anderson-darling decision is affine invariant") {
  Rng rng(5);
  std::vector<double> x(500), y(500);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = rng.normal() + 0.2 * rng.normal() * rng.normal();  // slightly non-normal
    y[i] = 13.0 - 4.5 * x[i];
  }
  const auto rx = anderson_darling(x);
  const auto ry = anderson_darling(y);
  CHECK(rx.a2_star == doctest::Approx(ry.a2_star).epsilon(1e-9));
  CHECK(rx.reject_at_05 == ry.reject_at_05);
}

TEST_CASE("kde: single point with forced unit bandwidth") {
  std::vector<double> v = {0.0};
  const auto g = gaussian_kde(v, 1.0, 512);
  // value at y = 0 equals 1/sqrt(2 pi)
  double best = 1e9, f_at = 0;
  for (std::size_t i = 0; i < g.y.size(); ++i)
    if (std::abs(g.y[i]) < best) {
      best = std::abs(g.y[i]);
      f_at = g.f[i];
    }
  CHECK(f_at == doctest::Approx(0.398942).epsilon(1e-3));
  CHECK_THROWS_AS(gaussian_kde(v), InsufficientDataError);  // no bandwidth
}

TEST_CASE("kde: symmetric sample gives a symmetric grid") {
  std::vector<double> v = {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0};
  const auto g = gaussian_kde(v);
  const std::size_t m = g.y.size();
  for (std::size_t i = 0; i < m; ++i)
    CHECK(g.f[i] == doctest::Approx(g.f[m - 1 - i]).epsilon(1e-10));
}

TEST_CASE("kde integrates to one") {
  Rng rng(31);
  std::vector<double> v(400);
  for (auto& x : v) x = rng.normal(1.0, 2.0);
  const auto g = gaussian_kde(v);
  CHECK(grid_integral(g) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("kde mean tracks the sample mean within two bandwidths") {
  Rng rng(13);
  std::vector<double> v(300);
  double sm = 0;
  for (auto& x : v) {
    x = rng.normal(0.7, 1.3);
    sm += x;
  }
  sm /= static_cast<double>(v.size());
  const auto g = gaussian_kde(v);
  const auto ms = moment_summary(g);
  CHECK(std::abs(ms.mean - sm) < 2.0 * g.bandwidth);
}

TEST_CASE("moment summary of a standard normal grid") {
  DensityGrid g;
  g.y = linspace(-8.0, 8.0, 2001);
  for (double y : g.y) g.f.push_back(norm_pdf(y));
  const auto ms = moment_summary(g);
  CHECK(ms.mean == doctest::Approx(0.0).epsilon(0.02));
  CHECK(std::abs(ms.mean) < 0.02);
  CHECK(ms.median == doctest::Approx(0.0).epsilon(0.02));
  CHECK(std::abs(ms.median) < 0.02);
  CHECK(ms.variance == doctest::Approx(1.0).epsilon(0.02));
  CHECK(std::abs(ms.skewness) < 0.02);
  CHECK(ms.kurtosis == doctest::Approx(3.0).epsilon(0.02));
}

TEST_CASE("moment summary is translation equivariant") {
  DensityGrid g;
  g.y = linspace(-6.0, 6.0, 1501);
  for (double y : g.y) g.f.push_back(0.6 * norm_pdf(y, -1.0, 0.5) +
                                     0.4 * norm_pdf(y, 1.5, 1.0));
  auto shifted = g;
  const double c = 2.75;
  for (auto& y : shifted.y) y += c;
  const auto a = moment_summary(g);
  const auto b = moment_summary(shifted);
  CHECK(b.mean - a.mean == doctest::Approx(c).epsilon(1e-10));
  CHECK(b.variance == doctest::Approx(a.variance).epsilon(1e-10));
  CHECK(b.skewness == doctest::Approx(a.skewness).epsilon(1e-10));
  CHECK(b.kurtosis == doctest::Approx(a.kurtosis).epsilon(1e-10));
}

TEST_CASE("a heavier left shoulder shows up as negative skewness") {
  DensityGrid g;
  g.y = linspace(-6.0, 4.0, 1501);
  for (double y : g.y)
    g.f.push_back(0.35 * norm_pdf(y, -2.5, 1.0) + 0.65 * norm_pdf(y, 0.5, 0.3));
  CHECK(moment_summary(g).skewness < 0.0);
}

TEST_CASE("moment summary rejects a degenerate grid") {
  DensityGrid g;
  g.y = {1.0};
  g.f = {1.0};
  CHECK_THROWS_AS(moment_summary(g), DegenerateError);
}

TEST_CASE("sample moment summary uses the n divisor") {
  std::vector<double> v = {1.0, 3.0};
  const auto ms = moment_summary(std::span<const double>(v.data(), 2));
  CHECK(ms.mean == 2.0);
  CHECK(ms.variance == 1.0);  // ((1)^2 + (1)^2)/2
  CHECK(ms.median == 2.0);
}

TEST_CASE("mode counting") {
  DensityGrid uni;
  uni.y = linspace(-5, 5, 801);
  for (double y : uni.y) uni.f.push_back(norm_pdf(y));
  CHECK(count_modes(uni) == 1);

  DensityGrid bi;
  bi.y = linspace(-6, 6, 801);
  for (double y : bi.y)
    bi.f.push_back(0.5 * norm_pdf(y, -2.0, 0.4) + 0.5 * norm_pdf(y, 2.0, 0.4));
  CHECK(count_modes(bi) == 2);

  // a bump below the prominence threshold does not count
  DensityGrid faint;
  faint.y = linspace(-6, 6, 801);
  for (double y : faint.y)
    faint.f.push_back(norm_pdf(y, 0.0, 0.5) + 0.015 * norm_pdf(y, 4.0, 0.3));
  CHECK(count_modes(faint, 0.05) == 1);
  CHECK(count_modes(faint, 0.001) == 2);
}
