#include <cmath>
#include <map>
#include <vector>

#include "bmeta/bnp_model.hpp"
#include "bmeta/errors.hpp"
#include "bmeta/eval.hpp"
#include "bmeta/synthetic.hpp"
#include "bmeta/util.hpp"
#include "doctest.h"
#include "support/geweke.hpp"
#include "support/oracles.hpp"

using namespace bmeta;

namespace {

MetaDataset make_dataset(std::vector<double> ys, std::vector<double> vars,
                         Eigen::MatrixXd x = {}) {
  MetaDataset d;
  const int n = static_cast<int>(ys.size());
  d.y = Eigen::Map<Eigen::VectorXd>(ys.data(), n);
  d.var = Eigen::Map<Eigen::VectorXd>(vars.data(), n);
  for (int i = 0; i < n; ++i) {
    d.study.push_back("s" + std::to_string(i));
    d.report.push_back("r" + std::to_string(i));
  }
  if (x.size() == 0) x.resize(n, 0);
  d.covariates = std::move(x);
  for (int k = 0; k < d.p(); ++k)
    d.covariate_names.push_back("x" + std::to_string(k + 1));
  return d;
}

}  // namespace

TEST_CASE("mixture weights: standard normal cdf fixture") {
  const auto ww = mixture_weights(0.0, 1.0, 6);
  CHECK(ww.weight_at(0) == doctest::Approx(0.341345).epsilon(1e-5));
  CHECK(ww.weight_at(1) == doctest::Approx(0.341345).epsilon(1e-5));
}

TEST_CASE("mixture weights: vanishing dispersion concentrates on one cell") {
  const auto ww = mixture_weights(0.5, 1e-8, 6);
  CHECK(ww.weight_at(1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ww.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mixture weights: spread grows with the dispersion") {
  // over sigma = 1/20, 1/2, 1, 2 the number of weights above .05 cannot drop
  int prev = 0;
  for (double sigma : {0.05, 0.5, 1.0, 2.0}) {
    const auto ww = mixture_weights(0.7, sigma, 8);
    int count = 0;
    for (double w : ww.w) count += w > 0.05;
    CHECK(count >= prev);
    prev = count;
  }
  CHECK(prev >= 5);  // sigma = 2 spreads mass over at least 5 cells
}

TEST_CASE("mixture weights telescope to a cdf difference") {
  Rng rng(40);
  for (int rep = 0; rep < 200; ++rep) {
    const double eta = rng.uniform(-5.0, 5.0);
    const double sigma = std::exp(rng.uniform(std::log(0.01), std::log(3.0)));
    const auto ww = mixture_weights(eta, sigma, 8);
    const double direct = ww.sum();
    const double telescoped = norm_cdf((ww.j_hi() - eta) / sigma) -
                              norm_cdf((ww.j_lo - 1 - eta) / sigma);
    CHECK(std::abs(direct - telescoped) < 1e-14);
    // omitted tail is bounded by 2 Phi(-W)
    CHECK(1.0 - direct <= 2.0 * norm_cdf(-8.0) + 1e-15);
  }
}

TEST_CASE("allocation: two separated intercepts give a near-certain choice") {
  auto d = make_dataset({3.0}, {0.01});
  BnpConfig cfg;
  BnpSampler sampler(d, cfg);
  Rng rng(9);
  int hits = 0;
  const int reps = 5000;
  for (int r = 0; r < reps; ++r) {
    BnpState s = sampler.initial_state();
    s.phi = 1.0;
    s.beta(0) = 0.0;
    s.beta_omega(0) = 0.0;  // weights split between cells 0 and 1
    s.sigma_omega = 0.3;
    s.mu0.clear();
    s.mu0[0] = -3.0;
    s.mu0[1] = 3.0;
    s.sigma0_sq = 1e-12;  // fresh window cells stay near zero
    sampler.update_allocations(s, rng);
    hits += s.alloc[0] == 1;
  }
  CHECK(hits / static_cast<double>(reps) > 0.999);
}

TEST_CASE("allocation: dispersion collapse forces the covered cell") {
  auto d = make_dataset({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0});
  BnpConfig cfg;
  BnpSampler sampler(d, cfg);
  Rng rng(10);
  BnpState s = sampler.initial_state();
  s.beta_omega(0) = 0.5;
  s.sigma_omega = 1e-9;
  sampler.update_allocations(s, rng);
  for (int di : s.alloc) CHECK(di == 1);
}

TEST_CASE("allocation frequencies match the weights when the data are flat") {
  // a huge dispersion makes the likelihood constant over the window, so the
  // empirical allocation distribution must reproduce the weights
  auto d = make_dataset({0.0}, {1.0});
  BnpConfig cfg;
  BnpSampler sampler(d, cfg);
  Rng rng(11);
  const double eta = 0.3, sw = 1.1;
  std::map<int, int> counts;
  const int reps = 100000;
  for (int r = 0; r < reps; ++r) {
    BnpState s = sampler.initial_state();
    s.phi = 1e10;
    s.beta(0) = 0.0;
    s.beta_omega(0) = eta;
    s.sigma_omega = sw;
    s.sigma0_sq = 1.0;
    sampler.update_allocations(s, rng);
    counts[s.alloc[0]]++;
  }
  const auto ww = mixture_weights(eta, sw, cfg.window_sample);
  for (int j = ww.j_lo; j <= ww.j_hi(); ++j) {
    const double freq = counts.count(j) ? counts[j] / static_cast<double>(reps) : 0.0;
    CHECK(std::abs(freq - ww.weight_at(j)) < 0.01);
  }
}

TEST_CASE("latent probit stays in its cell and degenerates correctly") {
  auto d = make_dataset({0.0, 1.0}, {0.5, 0.5});
  BnpConfig cfg;
  BnpSampler sampler(d, cfg);
  Rng rng(12);
  BnpState s = sampler.initial_state();
  s.alloc = {1, 3};
  s.mu0[1] = 0.0;
  s.mu0[3] = 0.5;
  s.beta_omega(0) = 0.5;
  s.sigma_omega = 1e-9;
  sampler.update_latent_probit(s, rng);
  // cell (0,1] contains the mean 0.5, so z -> 0.5 as dispersion vanishes
  CHECK(s.z[0] == doctest::Approx(0.5).epsilon(1e-6));
  // cell (2,3] is 2.5e9 sigma away: clamped to the near boundary
  CHECK(s.z[1] > 2.0);
  CHECK(s.z[1] <= 3.0);
  CHECK(sampler.probit_clip_count() == 1);

  s.sigma_omega = 0.8;
  for (int rep = 0; rep < 2000; ++rep) {
    sampler.update_latent_probit(s, rng);
    for (int i = 0; i < 2; ++i) {
      CHECK(s.z[static_cast<std::size_t>(i)] >
            s.alloc[static_cast<std::size_t>(i)] - 1.0);
      CHECK(s.z[static_cast<std::size_t>(i)] <=
            static_cast<double>(s.alloc[static_cast<std::size_t>(i)]));
    }
  }
}

TEST_CASE("weight regression: prior-only draw reproduces its gamma prior") {
  Rng rng(13);
  Eigen::MatrixXd x(0, 1);
  Eigen::VectorXd z(0);
  double sum = 0, sum2 = 0;
  const int reps = 200000;
  for (int r = 0; r < reps; ++r) {
    auto [beta, sigma] = nig_regression_draw(x, z, 1e5, 1.0, 1.0, rng);
    const double prec = 1.0 / (sigma * sigma);
    sum += prec;
    sum2 += prec * prec;
  }
  const double m = sum / reps;
  CHECK(m == doctest::Approx(1.0).epsilon(0.01));          // Gamma(1,1) mean
  CHECK(sum2 / reps - m * m == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("weight regression: vanishing residuals shrink the dispersion") {
  Rng rng(130);
  const int n = 500;
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(n, 1);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
  double mx = 0;
  for (int r = 0; r < 500; ++r) {
    auto [beta, sigma] = nig_regression_draw(x, z, 1e5, 1.0, 1.0, rng);
    mx = std::max(mx, sigma);
  }
  // precision ~ Gamma(1 + n/2, ~1): sigma concentrates near 1/sqrt(n/2)
  CHECK(mx < 0.15);
}

TEST_CASE("weight regression recovers a known generating pair") {
  Rng rng(14);
  const int n = 500;
  const double true_b0 = 0.4, true_b1 = -0.8, true_sigma = 0.6;
  Eigen::MatrixXd x(n, 2);
  Eigen::VectorXd z(n);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = rng.normal();
    z(i) = true_b0 + true_b1 * x(i, 1) + rng.normal(0, true_sigma);
  }
  double sb0 = 0, sb1 = 0, ssig = 0;
  std::vector<double> b0s, b1s, sigs;
  const int reps = 4000;
  for (int r = 0; r < reps; ++r) {
    auto [beta, sigma] = nig_regression_draw(x, z, 1e5, 1.0, 1.0, rng);
    b0s.push_back(beta(0));
    b1s.push_back(beta(1));
    sigs.push_back(sigma);
    sb0 += beta(0);
    sb1 += beta(1);
    ssig += sigma;
  }
  // iid draws: 3 standard errors of the Monte Carlo mean, plus the
  // posterior's own distance from truth at n=500 (~3/sqrt(n) in sd units)
  const double tol0 = 3.0 * sample_sd(b0s) / std::sqrt(1.0 * reps) +
                      3.0 * true_sigma / std::sqrt(1.0 * n);
  CHECK(std::abs(sb0 / reps - true_b0) < tol0);
  CHECK(std::abs(sb1 / reps - true_b1) < tol0);
  CHECK(std::abs(ssig / reps - true_sigma) < 3.0 * true_sigma / std::sqrt(1.0 * n));
}

TEST_CASE("intercept update: conjugate one-member fixture") {
  auto d = make_dataset({2.0}, {1.0});
  BnpConfig cfg;
  BnpSampler sampler(d, cfg);
  Rng rng(15);
  double sum = 0, sum2 = 0;
  const int reps = 200000;
  for (int r = 0; r < reps; ++r) {
    BnpState s = sampler.initial_state();
    s.phi = 1.0;
    s.beta(0) = 0.0;
    s.alloc = {4};
    s.mu0.clear();
    s.mu0[4] = 0.0;
    s.sigma0_sq = 1.0;
    sampler.update_intercepts(s, rng);
    sum += s.mu0[4];
    sum2 += s.mu0[4] * s.mu0[4];
  }
  const double m = sum / reps;
  CHECK(m == doctest::Approx(1.0).epsilon(0.01));
  CHECK(sum2 / reps - m * m == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("intercept update: unoccupied components are prior draws") {
  auto d = make_dataset({2.0}, {1.0});
  BnpConfig cfg;
  BnpSampler sampler(d, cfg);
  Rng rng(16);
  double sum = 0, sum2 = 0;
  const int reps = 100000;
  for (int r = 0; r < reps; ++r) {
    BnpState s = sampler.initial_state();
    s.alloc = {0};
    s.mu0.clear();
    s.mu0[0] = 0.0;
    s.mu0[7] = 123.0;  // instantiated but unoccupied
    s.sigma0_sq = 0.25;
    sampler.update_intercepts(s, rng);
    sum += s.mu0[7];
    sum2 += s.mu0[7] * s.mu0[7];
  }
  CHECK(sum / reps == doctest::Approx(0.0).epsilon(0.01));
  CHECK(std::abs(sum / reps) < 0.01);
  CHECK(sum2 / reps == doctest::Approx(0.25).epsilon(0.02));
}

TEST_CASE("intercept update: likelihood dominates at high occupancy") {
  const int n = 400;
  std::vector<double> ys(n, 1.5), vars(n, 0.09);
  auto d = make_dataset(ys, vars);
  BnpConfig cfg;
  BnpSampler sampler(d, cfg);
  Rng rng(17);
  BnpState s = sampler.initial_state();
  s.phi = 1.0;
  s.beta(0) = 0.0;
  s.alloc.assign(static_cast<std::size_t>(n), 2);
  s.mu0.clear();
  s.mu0[2] = 0.0;
  s.sigma0_sq = 1.0;
  double sum = 0;
  const int reps = 2000;
  for (int r = 0; r < reps; ++r) {
    sampler.update_intercepts(s, rng);
    sum += s.mu0[2];
  }
  CHECK(sum / reps == doctest::Approx(1.5).epsilon(0.005));
}

TEST_CASE("phi update: strong prior pins the dispersion at one") {
  auto d = make_dataset({0.3, -0.2}, {0.1, 0.2});
  BnpConfig cfg;
  cfg.priors.a_phi = 1e8;
  BnpSampler sampler(d, cfg);
  Rng rng(18);
  BnpState s = sampler.initial_state();
  s.alloc = {0, 0};
  s.mu0.clear();
  s.mu0[0] = 0.0;
  double sum = 0;
  const int reps = 2000;
  for (int r = 0; r < reps; ++r) {
    sampler.update_phi(s, rng);
    sum += s.phi;
  }
  CHECK(sum / reps == doctest::Approx(1.0).epsilon(0.001));
}

TEST_CASE("phi update: perfect fit gives the conjugate gamma posterior") {
  // residuals identically zero, no covariates: phi^-1 ~ Gamma(a/2 + n/2, a/2)
  auto d = make_dataset({0.7, 0.7, 0.7}, {0.1, 0.1, 0.1});
  BnpConfig cfg;
  cfg.priors.a_phi = 0.5;
  BnpSampler sampler(d, cfg);
  Rng rng(19);
  BnpState s = sampler.initial_state();
  s.beta(0) = 0.0;
  s.alloc = {5, 5, 5};
  s.mu0.clear();
  s.mu0[5] = 0.7;
  double sum = 0, sum2 = 0;
  const int reps = 300000;
  for (int r = 0; r < reps; ++r) {
    sampler.update_phi(s, rng);
    const double prec = 1.0 / s.phi;
    sum += prec;
    sum2 += prec * prec;
  }
  const double shape = 0.25 + 1.5, rate = 0.25;
  const double m = sum / reps;
  CHECK(m == doctest::Approx(shape / rate).epsilon(0.01));
  CHECK(sum2 / reps - m * m ==
        doctest::Approx(shape / (rate * rate)).epsilon(0.03));
}

TEST_CASE("sigma0 update concentrates near the occupied spread") {
  // 50 occupied components at +-2: the scale posterior sits near 2
  const int n = 50;
  std::vector<double> ys(n, 0.0), vars(n, 0.1);
  auto d = make_dataset(ys, vars);
  BnpConfig cfg;
  BnpSampler sampler(d, cfg);
  Rng rng(20);
  BnpState s = sampler.initial_state();
  s.mu0.clear();
  s.alloc.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    s.mu0[j] = (j % 2 == 0) ? 2.0 : -2.0;
    s.alloc[static_cast<std::size_t>(j)] = j;
  }
  s.sigma0_sq = 1.0;
  double sum = 0;
  const int reps = 20000;
  for (int r = 0; r < reps; ++r) {
    sampler.update_sigma0(s, rng);
    sum += std::sqrt(s.sigma0_sq);
    CHECK(s.sigma0_sq > 0.0);
    CHECK(s.sigma0_sq < 100.0 * 100.0);
  }
  const double mc = sum / reps;
  CHECK(mc == doctest::Approx(2.0).epsilon(0.1));

  // quadrature oracle for the same conditional
  auto density = [&](double sigma) {
    return sigma <= 0
               ? 0.0
               : std::exp(-n * std::log(sigma) - 0.5 * n * 4.0 / (sigma * sigma));
  };
  const auto table = oracle::cdf_table(density, 1e-4, 100.0, 400001);
  const double oracle_mean =
      oracle::mean_under(table, [](double x) { return x; });
  CHECK(mc == doctest::Approx(oracle_mean).epsilon(0.02));
}

TEST_CASE("predictive moments: degenerate and two-cell mixtures") {
  BnpState s;
  s.beta = Eigen::VectorXd::Zero(1);
  s.beta_omega = Eigen::VectorXd::Zero(1);
  s.phi = 1.0;
  s.sigma0_sq = 1e-12;
  Rng rng(21);

  // single dominant weight at cell 1
  s.beta_omega(0) = 0.5;
  s.sigma_omega = 1e-6;
  s.mu0[1] = 0.8;
  auto pm = predictive_moments_bnp(s, Eigen::VectorXd(), 0.01, 8, rng);
  CHECK(pm.mean == doctest::Approx(0.8).epsilon(1e-9));
  CHECK(pm.var == doctest::Approx(0.01).epsilon(1e-9));

  // equal split over cells 0 and 1 with means -1 and +1
  s.beta_omega(0) = 0.0;
  s.sigma_omega = 1e-6;
  s.mu0.clear();
  s.mu0[0] = -1.0;
  s.mu0[1] = 1.0;
  pm = predictive_moments_bnp(s, Eigen::VectorXd(), 0.01, 8, rng);
  CHECK(pm.mean == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(pm.var == doctest::Approx(1.01).epsilon(1e-9));
}

TEST_CASE("predictive variance never falls below the dispersion floor") {
  Rng rng(22);
  for (int rep = 0; rep < 50; ++rep) {
    BnpState s;
    s.beta = Eigen::VectorXd::Constant(1, rng.normal());
    s.beta_omega = Eigen::VectorXd::Constant(1, rng.normal());
    s.sigma_omega = std::exp(rng.uniform(-2.0, 1.0));
    s.phi = std::exp(rng.uniform(-2.0, 1.0));
    s.sigma0_sq = std::exp(rng.uniform(-2.0, 1.0));
    const double sigma_sq = 0.05;
    const auto pm =
        predictive_moments_bnp(s, Eigen::VectorXd(), sigma_sq, 8, rng);
    CHECK(pm.var >= s.phi * sigma_sq - 1e-12);
  }
}

TEST_CASE("sweep preserves the augmentation invariants") {
  SyntheticSpec gen;
  gen.kind = GenKind::bimodal;
  gen.n = 60;
  gen.p = 1;
  const auto [raw, truth] = generate_synthetic(gen, 33);
  const auto [d, info] = standardize_covariates(raw);

  BnpConfig cfg;
  BnpSampler sampler(d, cfg);
  BnpState s = sampler.initial_state();
  Rng rng(77);
  for (int it = 0; it < 300; ++it) {
    sampler.sweep(s, rng);
    for (int i = 0; i < d.n(); ++i) {
      const int di = s.alloc[static_cast<std::size_t>(i)];
      CHECK(s.mu0.count(di) == 1);
      CHECK(s.z[static_cast<std::size_t>(i)] > di - 1.0);
      CHECK(s.z[static_cast<std::size_t>(i)] <= static_cast<double>(di));
    }
    // after a sweep only occupied components remain
    for (const auto& [j, mu] : s.mu0) {
      bool used = false;
      for (int di : s.alloc) used = used || (di == j);
      CHECK(used);
    }
  }
}

TEST_CASE("bnp fit on fixed-effects data recovers the weighted mean") {
  SyntheticSpec gen;
  gen.kind = GenKind::fixed_effects;
  gen.n = 50;
  gen.beta0 = 0.5;
  const auto [d, truth] = generate_synthetic(gen, 60);
  const double wmean =
      (d.y.array() / d.var.array()).sum() / d.var.cwiseInverse().sum();

  BnpConfig cfg;
  McmcConfig mc;
  mc.burn = 3000;
  mc.keep = 20000;
  mc.seed = 61;
  const auto fit = fit_bnp(d, cfg, mc);

  // beta0 and the allocated intercepts share the location, so beta0 mixes
  // slowly; its batch-means error reflects that and the closed-form check
  // holds at 3 mcse. The predictive mean at the centered covariate point is
  // the sharply identified version of the same quantity.
  const auto tr = fit.trace("beta0");
  const auto diag_b = mc_diagnostics(tr);
  CHECK(std::abs(mean_of(tr) - wmean) < 3.0 * diag_b.mcse);

  std::vector<double> pred_mean(tr.size());
  for (std::size_t s = 0; s < tr.size(); ++s)
    pred_mean[s] =
        fit.draw_moments(static_cast<int>(s), Eigen::VectorXd(), 1e-4).mean;
  const auto diag = mc_diagnostics(pred_mean);
  CHECK(std::abs(mean_of(pred_mean) - wmean) <
        std::max(3.0 * diag.mcse, 0.02));
}

TEST_CASE("bnp fit is deterministic given the seed") {
  SyntheticSpec gen;
  gen.kind = GenKind::bimodal;
  gen.n = 40;
  gen.p = 1;
  const auto [raw, truth] = generate_synthetic(gen, 3);
  const auto [d, info] = standardize_covariates(raw);
  BnpConfig cfg;
  McmcConfig mc;
  mc.burn = 200;
  mc.keep = 400;
  mc.seed = 5;
  const auto a = fit_bnp(d, cfg, mc);
  const auto b = fit_bnp(d, cfg, mc);
  CHECK(a.samples() == b.samples());
  CHECK(a.components().index == b.components().index);
  CHECK(a.components().mu == b.components().mu);
}

TEST_CASE("geweke: infinite-mixture sampler") {
  Rng fixture_rng(777);
  const int n = 10;
  std::vector<double> ys(n, 0.0), vars(n);
  Eigen::MatrixXd xm(n, 1);
  for (int i = 0; i < n; ++i) {
    xm(i, 0) = fixture_rng.normal();
    vars[static_cast<std::size_t>(i)] = 0.5 + 2.0 * fixture_rng.uniform();
  }
  auto d = make_dataset(ys, vars, xm);

  BnpConfig cfg;
  cfg.priors.v_intercept = 2.0;
  cfg.priors.v_weight = 2.0;
  cfg.priors.b0 = 1.5;
  cfg.priors.a_phi = 0.5;
  BnpSampler sampler(d, cfg);
  BnpState s;
  Rng rng(888);
  const auto& pr = cfg.priors;

  auto draw_prior = [&] {
    s = BnpState{};
    s.phi = 1.0 / rng.gamma(pr.a_phi / 2.0, pr.a_phi / 2.0);
    const double sigma0 = rng.uniform(0, pr.b0);
    s.sigma0_sq = sigma0 * sigma0;
    s.sigma_omega = 1.0 / std::sqrt(rng.gamma(1.0, 1.0));
    s.beta_omega = Eigen::VectorXd(2);
    s.beta_omega(0) = rng.normal(0, s.sigma_omega * std::sqrt(pr.v_weight));
    s.beta_omega(1) = rng.normal(0, s.sigma_omega * std::sqrt(pr.v_weight));
    s.gamma.assign(1, rng.bernoulli(pr.bernoulli_p) ? 1 : 0);
    s.beta = Eigen::VectorXd(2);
    s.beta(0) = rng.normal(0, std::sqrt(pr.v_intercept));
    s.beta(1) = rng.normal(
        0, std::sqrt(s.phi * (s.gamma[0] ? pr.v_slab : pr.v_spike)));
    s.alloc.assign(static_cast<std::size_t>(n), 0);
    s.z.assign(static_cast<std::size_t>(n), 0.0);
  };
  auto draw_data = [&] {
    std::map<int, double> occupied;
    for (int i = 0; i < n; ++i) {
      const double eta = s.beta_omega(0) + s.beta_omega(1) * d.covariates(i, 0);
      const double zi = rng.normal(eta, s.sigma_omega);
      const int di = static_cast<int>(std::ceil(zi));
      s.z[static_cast<std::size_t>(i)] = zi;
      s.alloc[static_cast<std::size_t>(i)] = di;
      auto it = s.mu0.find(di);
      if (it == s.mu0.end())
        it = s.mu0.emplace(di, rng.normal(0, std::sqrt(s.sigma0_sq))).first;
      occupied.emplace(di, it->second);
      d.y(i) = it->second + s.beta(0) + s.beta(1) * d.covariates(i, 0) +
               rng.normal(0, std::sqrt(s.phi * d.var(i)));
    }
    s.mu0 = std::move(occupied);
  };
  auto monitor = [&]() -> std::vector<double> {
    const double inv_phi = 1.0 / s.phi;
    const double inv_sw2 = 1.0 / (s.sigma_omega * s.sigma_omega);
    return {s.beta(0),
            s.beta(0) * s.beta(0),
            static_cast<double>(s.gamma[0]),
            inv_phi,
            inv_phi * inv_phi,
            s.sigma0_sq,
            inv_sw2,
            static_cast<double>(s.mu0.size())};
  };

  const auto res = bmeta_tests::geweke_compare(
      {"beta0", "beta0^2", "gamma1", "inv_phi", "inv_phi^2", "s0sq",
       "inv_sw2", "n_occ"},
      50000, [&] { draw_prior(); draw_data(); },
      [&] { sampler.sweep(s, rng); draw_data(); }, monitor);
  for (const auto& r : res) {
    CAPTURE(r.name);
    CAPTURE(r.mean_marginal);
    CAPTURE(r.mean_chain);
    CHECK(std::abs(r.z) < 4.0);
  }
}
