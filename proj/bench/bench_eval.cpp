// Timing comparison of the serial reference kernels against the OpenMP
// versions on synthetic draw tables sized like a long production run.
// Usage: bench_eval [keep] [grid_points]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "bmeta/bnp_model.hpp"
#include "bmeta/eval.hpp"
#include "bmeta/normal_model.hpp"
#include "bmeta/rng.hpp"
#include "bmeta/synthetic.hpp"
#include "bmeta/util.hpp"

using namespace bmeta;

namespace {

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

NormalDraws synth_normal(int keep, int n, int p) {
  Rng rng(1);
  NormalModelSpec spec;
  spec.kind = ModelKind::RE2L;
  spec.covariate_mode = CovariateMode::all;
  std::vector<std::string> names;
  for (int k = 0; k <= p; ++k) names.push_back("beta" + std::to_string(k));
  names.emplace_back("sigma0_sq");
  names.emplace_back("mean_mu0");
  Eigen::MatrixXd samples(keep, static_cast<int>(names.size()));
  for (int t = 0; t < keep; ++t) {
    for (int k = 0; k <= p; ++k) samples(t, k) = rng.normal(0.5, 0.05);
    samples(t, p + 1) = 0.02 + 0.01 * rng.uniform();
    samples(t, p + 2) = 0.0;
  }
  DrawsMeta meta;
  meta.model_label = "2L-x";
  meta.n = n;
  meta.p = p;
  return NormalDraws(spec, std::move(names), std::move(samples), meta);
}

BnpDraws synth_bnp(int keep, int n, int p) {
  Rng rng(2);
  BnpConfig cfg;
  std::vector<std::string> names;
  for (int k = 0; k <= p; ++k) names.push_back("beta" + std::to_string(k));
  for (int k = 1; k <= p; ++k) names.push_back("gamma" + std::to_string(k));
  names.emplace_back("phi");
  names.emplace_back("sigma0_sq");
  for (int k = 0; k <= p; ++k)
    names.push_back("beta_omega" + std::to_string(k));
  names.emplace_back("sigma_omega");
  names.emplace_back("n_occupied");
  Eigen::MatrixXd samples(keep, static_cast<int>(names.size()));
  ComponentTable comps;
  comps.offsets.push_back(0);
  for (int t = 0; t < keep; ++t) {
    int c = 0;
    for (int k = 0; k <= p; ++k) samples(t, c++) = rng.normal(0.3, 0.1);
    for (int k = 1; k <= p; ++k) samples(t, c++) = rng.bernoulli(0.2);
    samples(t, c++) = 0.1 + 0.05 * rng.uniform();        // phi
    samples(t, c++) = 4.0 + rng.uniform();               // sigma0_sq
    for (int k = 0; k <= p; ++k) samples(t, c++) = rng.normal(0.0, 1.0);
    samples(t, c++) = 0.3 + 0.4 * rng.uniform();         // sigma_omega
    const int occ = 6 + static_cast<int>(rng.uniform() * 10);
    samples(t, c++) = occ;
    for (int j = -occ / 2; j < occ - occ / 2; ++j) {
      comps.index.push_back(j);
      comps.mu.push_back(rng.normal(0.0, 2.0));
    }
    comps.offsets.push_back(static_cast<int>(comps.index.size()));
  }
  DrawsMeta meta;
  meta.model_label = "BNP-ss";
  meta.seed = 7;
  meta.n = n;
  meta.p = p;
  return BnpDraws(cfg, std::move(names), std::move(samples), std::move(comps),
                  meta);
}

struct Timing {
  double serial_ms, parallel_ms;
};

template <class Fn>
Timing time_pair(Fn&& fn) {
  fn(Exec::serial);  // warm up allocations
  const double t0 = now_ms();
  fn(Exec::serial);
  const double t1 = now_ms();
  fn(Exec::parallel);
  const double t2 = now_ms();
  return {t1 - t0, t2 - t1};
}

void report(const char* name, const Timing& t) {
  std::printf("%-34s %10.1f %10.1f %8.2fx\n", name, t.serial_ms, t.parallel_ms,
              t.serial_ms / std::max(t.parallel_ms, 1e-9));
}

}  // namespace

int main(int argc, char** argv) {
  const int keep = argc > 1 ? std::atoi(argv[1]) : 20000;
  const int grid_points = argc > 2 ? std::atoi(argv[2]) : 512;
  const int n = 200, p = 2;

#ifdef _OPENMP
  std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
  std::printf("openmp: not enabled (serial fallback)\n");
#endif
  std::printf("draws=%d grid=%d n=%d p=%d\n\n", keep, grid_points, n, p);
  std::printf("%-34s %10s %10s %9s\n", "kernel", "serial ms", "openmp ms",
              "speedup");

  SyntheticSpec gen;
  gen.kind = GenKind::bimodal;
  gen.n = n;
  gen.p = p;
  const auto [data, truth] = generate_synthetic(gen, 3);

  const auto normal = synth_normal(keep, n, p);
  const auto bnp = synth_bnp(keep, n, p);
  const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(p);
  const auto grid = linspace(-6.0, 6.0, grid_points);

  report("density grid, normal model", time_pair([&](Exec e) {
           posterior_predictive_density(normal, x0, 1e-4, grid, e);
         }));
  report("density grid, mixture model", time_pair([&](Exec e) {
           posterior_predictive_density(bnp, x0, 1e-4, grid, e);
         }));
  report("moment table, normal model", time_pair([&](Exec e) {
           predictive_moment_table(normal, data, e);
         }));
  report("moment table, mixture model", time_pair([&](Exec e) {
           predictive_moment_table(bnp, data, e);
         }));
  report("predictive-error criterion", time_pair([&](Exec e) {
           d_criterion(bnp, data, e);
         }));
  return 0;
}
