#include "bmeta/bnp_model.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "bmeta/errors.hpp"
#include "bmeta/util.hpp"

namespace bmeta {

double WeightWindow::sum() const {
  double s = 0;
  for (double v : w) s += v;
  return s;
}

WeightWindow mixture_weights(double eta, double sigma_omega, int window) {
  if (window < 1) throw DomainError("mixture_weights: window must be >= 1");
  if (!(sigma_omega > 0))
    throw DomainError("mixture_weights: sigma_omega must be > 0");
  const double half = window * sigma_omega;
  constexpr double kMaxIndex = 1e9;
  if (std::abs(eta) + half > kMaxIndex)
    throw NumericalError("mixture_weights: window exceeds index range");
  WeightWindow ww;
  ww.j_lo = static_cast<int>(std::floor(eta - half));
  const int j_hi = static_cast<int>(std::ceil(eta + half));
  ww.w.resize(static_cast<std::size_t>(j_hi - ww.j_lo + 1));
  // w_j = Phi((j-eta)/s) - Phi((j-1-eta)/s); reuse each CDF evaluation
  double prev = norm_cdf((ww.j_lo - 1 - eta) / sigma_omega);
  for (int j = ww.j_lo; j <= j_hi; ++j) {
    const double cur = norm_cdf((j - eta) / sigma_omega);
    ww.w[static_cast<std::size_t>(j - ww.j_lo)] = cur - prev;
    prev = cur;
  }
  return ww;
}

std::string BnpConfig::label(int p) const {
  std::string s = "BNP";
  if (p == 0) return s + "-0";
  switch (covariate_mode) {
    case CovariateMode::none: return s + "-0";
    case CovariateMode::all: return s + "-x";
    case CovariateMode::spike_slab: return s + "-ss";
  }
  return s;
}

BnpSampler::BnpSampler(const MetaDataset& d, BnpConfig cfg)
    : d_(d), cfg_(std::move(cfg)) {
  cfg_.priors.validate();
  if (cfg_.window_sample < 1 || cfg_.window_predict < 1)
    throw DomainError("bnp: truncation windows must be >= 1");
  const int n = d_.n(), p = d_.p();
  mode_ = p == 0 ? CovariateMode::none : cfg_.covariate_mode;
  q_ = mode_ == CovariateMode::none ? 1 : p + 1;
  xd_.resize(n, q_);
  xd_.col(0).setOnes();
  if (q_ > 1) xd_.rightCols(p) = d_.covariates;
}

BnpState BnpSampler::initial_state() const {
  const int n = d_.n();
  BnpState s;
  // weighted mean as the starting intercept, slopes at zero
  const double sw = d_.var.cwiseInverse().sum();
  const double swy = (d_.y.array() / d_.var.array()).sum();
  s.beta = Eigen::VectorXd::Zero(q_);
  s.beta(0) = swy / sw;
  if (mode_ == CovariateMode::spike_slab)
    s.gamma.assign(static_cast<std::size_t>(q_ - 1), 1);
  s.phi = 1.0;
  const double sdy = std::sqrt(sample_variance(
      std::span<const double>(d_.y.data(), static_cast<std::size_t>(n))));
  const double s0 = std::clamp(std::max(sdy, 0.5), 1e-3, 0.9 * cfg_.priors.b0);
  s.sigma0_sq = s0 * s0;
  s.beta_omega = Eigen::VectorXd::Zero(q_);
  s.sigma_omega = 1.0;
  s.alloc.assign(static_cast<std::size_t>(n), 1);
  s.z.assign(static_cast<std::size_t>(n), 0.5);
  s.mu0[1] = 0.0;
  return s;
}

void BnpSampler::update_allocations(BnpState& s, Rng& rng) const {
  const int n = d_.n();
  const Eigen::VectorXd xb = xd_ * s.beta;
  const Eigen::VectorXd eta = xd_ * s.beta_omega;
  std::vector<double> logp;
  for (int i = 0; i < n; ++i) {
    int window = cfg_.window_sample;
    for (int attempt = 0;; ++attempt) {
      const WeightWindow ww = mixture_weights(eta(i), s.sigma_omega, window);
      logp.resize(ww.w.size());
      const double comp_var = s.phi * d_.var(i);
      double best = -std::numeric_limits<double>::infinity();
      for (int j = ww.j_lo; j <= ww.j_hi(); ++j) {
        auto it = s.mu0.find(j);
        if (it == s.mu0.end())
          it = s.mu0.emplace(j, rng.normal(0.0, std::sqrt(s.sigma0_sq))).first;
        const double lw = std::log(ww.weight_at(j));
        const double lp =
            lw + norm_logpdf(d_.y(i), it->second + xb(i), comp_var);
        logp[static_cast<std::size_t>(j - ww.j_lo)] = lp;
        best = std::max(best, lp);
      }
      if (std::isfinite(best)) {
        s.alloc[static_cast<std::size_t>(i)] =
            ww.j_lo + rng.categorical_logits(logp);
        break;
      }
      if (attempt >= 1) {
        std::ostringstream os;
        os << "allocation update: all component weights vanished for record "
           << i << " (eta=" << eta(i) << ", sigma_omega=" << s.sigma_omega
           << ", widened window " << window << ")";
        throw NumericalError(os.str());
      }
      window *= 2;  // widen once, then give up
    }
  }
  collect_unoccupied(s);
}

void BnpSampler::collect_unoccupied(BnpState& s) const {
  std::map<int, double> occupied;
  for (int j : s.alloc) {
    auto it = s.mu0.find(j);
    if (it == s.mu0.end())
      throw NumericalError("allocation refers to a missing component");
    occupied.emplace(j, it->second);
  }
  s.mu0 = std::move(occupied);
}

void BnpSampler::update_latent_probit(BnpState& s, Rng& rng) {
  const Eigen::VectorXd eta = xd_ * s.beta_omega;
  for (int i = 0; i < d_.n(); ++i) {
    const double lo = s.alloc[static_cast<std::size_t>(i)] - 1.0;
    const double hi = lo + 1.0;
    const double a = (lo - eta(i)) / s.sigma_omega;
    const double b = (hi - eta(i)) / s.sigma_omega;
    double zi;
    if (a > 8.0) {
      zi = std::nextafter(lo, hi);  // interval far above the mean
      ++probit_clips_;
    } else if (b < -8.0) {
      zi = hi;
      ++probit_clips_;
    } else {
      zi = rng.trunc_normal(eta(i), s.sigma_omega, lo, hi);
    }
    s.z[static_cast<std::size_t>(i)] = std::clamp(zi, std::nextafter(lo, hi), hi);
  }
}

void BnpSampler::update_weight_regression(BnpState& s, Rng& rng) const {
  const Eigen::Map<const Eigen::VectorXd> z(s.z.data(),
                                            static_cast<int>(s.z.size()));
  auto [beta_omega, sigma_omega] =
      nig_regression_draw(xd_, z, cfg_.priors.v_weight, 1.0, 1.0, rng);
  s.beta_omega = std::move(beta_omega);
  s.sigma_omega = sigma_omega;
}

void BnpSampler::update_intercepts(BnpState& s, Rng& rng) const {
  const Eigen::VectorXd xb = xd_ * s.beta;
  std::map<int, std::pair<double, double>> stats;  // j -> (sum w, sum w r)
  for (int i = 0; i < d_.n(); ++i) {
    const double w = 1.0 / (s.phi * d_.var(i));
    auto& st = stats[s.alloc[static_cast<std::size_t>(i)]];
    st.first += w;
    st.second += w * (d_.y(i) - xb(i));
  }
  const double prior_prec = 1.0 / s.sigma0_sq;
  for (auto& [j, mu] : s.mu0) {
    auto it = stats.find(j);
    if (it == stats.end()) {
      mu = rng.normal(0.0, std::sqrt(s.sigma0_sq));  // unoccupied: prior draw
      continue;
    }
    const double prec = prior_prec + it->second.first;
    mu = rng.normal(it->second.second / prec, std::sqrt(1.0 / prec));
  }
}

void BnpSampler::update_beta_gamma(BnpState& s, Rng& rng) const {
  Eigen::VectorXd r(d_.n());
  Eigen::VectorXd w(d_.n());
  for (int i = 0; i < d_.n(); ++i) {
    r(i) = d_.y(i) - s.mu0.at(s.alloc[static_cast<std::size_t>(i)]);
    w(i) = 1.0 / (s.phi * d_.var(i));
  }
  Eigen::VectorXd pv = Eigen::VectorXd::Constant(q_, cfg_.priors.v_intercept);
  if (mode_ == CovariateMode::spike_slab) {
    // slope prior variances are phi-scaled in this model
    for (int k = 1; k < q_; ++k)
      pv(k) = s.phi * (s.gamma[static_cast<std::size_t>(k - 1)]
                           ? cfg_.priors.v_slab
                           : cfg_.priors.v_spike);
  }
  s.beta = linreg_draw(xd_, r, w, pv, rng);
  if (mode_ == CovariateMode::spike_slab && q_ > 1)
    ssvs_gamma_draw(s.beta.tail(q_ - 1), s.phi * cfg_.priors.v_slab,
                    s.phi * cfg_.priors.v_spike, cfg_.priors.bernoulli_p, rng,
                    s.gamma);
}

void BnpSampler::update_phi(BnpState& s, Rng& rng) const {
  const Eigen::VectorXd xb = xd_ * s.beta;
  const double a = cfg_.priors.a_phi;
  double shape = 0.5 * (a + d_.n());
  double rate = 0.5 * a;
  for (int i = 0; i < d_.n(); ++i) {
    const double resid =
        d_.y(i) - s.mu0.at(s.alloc[static_cast<std::size_t>(i)]) - xb(i);
    rate += 0.5 * resid * resid / d_.var(i);
  }
  if (mode_ == CovariateMode::spike_slab) {
    // the phi-scaled slope priors contribute their quadratic forms
    shape += 0.5 * (q_ - 1);
    for (int k = 1; k < q_; ++k) {
      const double v = s.gamma[static_cast<std::size_t>(k - 1)]
                           ? cfg_.priors.v_slab
                           : cfg_.priors.v_spike;
      rate += 0.5 * s.beta(k) * s.beta(k) / v;
    }
  }
  s.phi = 1.0 / rng.gamma(shape, rate);
}

void BnpSampler::update_sigma0(BnpState& s, Rng& rng) const {
  // condition on occupied components only; unoccupied ones integrate out
  double ss = 0;
  int j_occ = 0;
  std::map<int, char> occ;
  for (int j : s.alloc) occ.emplace(j, 1);
  for (const auto& [j, flag] : occ) {
    ss += s.mu0.at(j) * s.mu0.at(j);
    ++j_occ;
  }
  if (j_occ == 0)
    throw InsufficientDataError("sigma0 update needs an occupied component");
  const double b0 = cfg_.priors.b0;
  double sigma = std::clamp(std::sqrt(s.sigma0_sq), 1e-9 * b0,
                            (1.0 - 1e-12) * b0);
  auto logf = [&](double x) {
    return -j_occ * std::log(x) - 0.5 * ss / (x * x);
  };
  sigma = slice_sample_bounded(sigma, logf, 0.0, b0, rng);
  s.sigma0_sq = sigma * sigma;
}

void BnpSampler::sweep(BnpState& s, Rng& rng) {
  update_allocations(s, rng);
  update_latent_probit(s, rng);
  update_weight_regression(s, rng);
  update_intercepts(s, rng);
  update_beta_gamma(s, rng);
  update_phi(s, rng);
  update_sigma0(s, rng);

  bool ok = std::isfinite(s.phi) && std::isfinite(s.sigma0_sq) &&
            std::isfinite(s.sigma_omega) && s.beta.allFinite() &&
            s.beta_omega.allFinite();
  for (const auto& [j, mu] : s.mu0) ok = ok && std::isfinite(mu);
  if (!ok) {
    std::ostringstream os;
    os << "bnp sweep diverged: beta0=" << s.beta(0) << " phi=" << s.phi
       << " sigma0_sq=" << s.sigma0_sq << " sigma_omega=" << s.sigma_omega
       << " components=" << s.mu0.size();
    throw NumericalError(os.str());
  }
}

PredMoments predictive_moments_bnp(const BnpState& s,
                                   const Eigen::VectorXd& xcov,
                                   double sigma_sq, int window, Rng& rng) {
  double eta = s.beta_omega(0);
  double xb = s.beta(0);
  for (int k = 1; k < s.beta_omega.size(); ++k) {
    eta += s.beta_omega(k) * xcov(k - 1);
    xb += s.beta(k) * xcov(k - 1);
  }
  const WeightWindow ww = mixture_weights(eta, s.sigma_omega, window);
  double m1 = 0, m2 = 0;
  for (int j = ww.j_lo; j <= ww.j_hi(); ++j) {
    auto it = s.mu0.find(j);
    const double mu =
        it != s.mu0.end() ? it->second : rng.normal(0.0, std::sqrt(s.sigma0_sq));
    const double m = mu + xb;
    const double w = ww.weight_at(j);
    m1 += w * m;
    m2 += w * m * m;
  }
  return {m1, s.phi * sigma_sq + std::max(0.0, m2 - m1 * m1)};
}

BnpDraws::BnpDraws(BnpConfig cfg, std::vector<std::string> names,
                   Eigen::MatrixXd samples, ComponentTable components,
                   DrawsMeta meta)
    : cfg_(std::move(cfg)), comps_(std::move(components)) {
  names_ = std::move(names);
  samples_ = std::move(samples);
  meta_ = std::move(meta);
  if (static_cast<int>(comps_.offsets.size()) != samples_.rows() + 1)
    throw MismatchError("component table does not match draw count");
  n_coefs_ = (meta_.p == 0 || cfg_.covariate_mode == CovariateMode::none)
                 ? 1
                 : meta_.p + 1;
  idx_beta_ = param_index("beta0");
  idx_phi_ = param_index("phi");
  idx_s0_ = param_index("sigma0_sq");
  idx_bw_ = param_index("beta_omega0");
  idx_sw_ = param_index("sigma_omega");
}

double BnpDraws::component_mu(int s, int j, double sigma0) const {
  const int lo = comps_.offsets[static_cast<std::size_t>(s)];
  const int hi = comps_.offsets[static_cast<std::size_t>(s) + 1];
  const auto first = comps_.index.begin() + lo;
  const auto last = comps_.index.begin() + hi;
  const auto it = std::lower_bound(first, last, j);
  if (it != last && *it == j)
    return comps_.mu[static_cast<std::size_t>(it - comps_.index.begin())];
  // unoccupied in this draw: a prior value, fixed by (seed, draw, index) so
  // repeated evaluations agree
  std::uint64_t h = splitmix64(meta_.seed ^
                               splitmix64(0x632be59bd9b4e019ULL ^
                                          static_cast<std::uint64_t>(s)) ^
                               static_cast<std::uint64_t>(
                                   static_cast<std::int64_t>(j)) *
                                   0x9e3779b97f4a7c15ULL);
  h = splitmix64(h);
  const double u =
      (static_cast<double>(h >> 11) + 0.5) * (1.0 / 9007199254740992.0);
  return norm_inv(u) * sigma0;
}

BnpDraws::Mixture BnpDraws::draw_mixture(int s, const Eigen::VectorXd& xcov,
                                         double sigma_sq) const {
  double eta = samples_(s, idx_bw_);
  double xb = samples_(s, idx_beta_);
  for (int k = 1; k < n_coefs_; ++k) {
    eta += samples_(s, idx_bw_ + k) * xcov(k - 1);
    xb += samples_(s, idx_beta_ + k) * xcov(k - 1);
  }
  const double sw = samples_(s, idx_sw_);
  const double sigma0 = std::sqrt(samples_(s, idx_s0_));
  const WeightWindow ww = mixture_weights(eta, sw, cfg_.window_predict);
  Mixture mix;
  mix.comp_var = samples_(s, idx_phi_) * sigma_sq;
  mix.w.reserve(ww.w.size());
  mix.m.reserve(ww.w.size());
  for (int j = ww.j_lo; j <= ww.j_hi(); ++j) {
    mix.w.push_back(ww.weight_at(j));
    mix.m.push_back(component_mu(s, j, sigma0) + xb);
  }
  return mix;
}

PredMoments BnpDraws::draw_moments(int s, const Eigen::VectorXd& xcov,
                                   double sigma_sq) const {
  const Mixture mix = draw_mixture(s, xcov, sigma_sq);
  double m1 = 0, m2 = 0;
  for (std::size_t k = 0; k < mix.w.size(); ++k) {
    m1 += mix.w[k] * mix.m[k];
    m2 += mix.w[k] * mix.m[k] * mix.m[k];
  }
  return {m1, mix.comp_var + std::max(0.0, m2 - m1 * m1)};
}

void BnpDraws::accumulate_draw_density(int s, std::span<const double> ygrid,
                                       const Eigen::VectorXd& xcov,
                                       double sigma_sq,
                                       std::span<double> out) const {
  const Mixture mix = draw_mixture(s, xcov, sigma_sq);
  const double inv_var = 1.0 / mix.comp_var;
  const double norm = 0.3989422804014326779 * std::sqrt(inv_var);
  for (std::size_t i = 0; i < ygrid.size(); ++i) {
    double f = 0;
    for (std::size_t k = 0; k < mix.w.size(); ++k) {
      const double d = ygrid[i] - mix.m[k];
      f += mix.w[k] * std::exp(-0.5 * d * d * inv_var);
    }
    out[i] += f * norm;
  }
}

BnpDraws fit_bnp(const MetaDataset& d, const BnpConfig& cfg,
                 const McmcConfig& mcmc) {
  if (mcmc.keep < 1 || mcmc.thin < 1 || mcmc.burn < 0)
    throw DomainError("fit_bnp: invalid mcmc settings");
  const auto t0 = std::chrono::steady_clock::now();
  BnpSampler sampler(d, cfg);
  Rng rng(mcmc.seed);
  BnpState s = sampler.initial_state();

  for (int it = 0; it < mcmc.burn; ++it) sampler.sweep(s, rng);

  const int p = d.p();
  const bool with_cov = p > 0 && cfg.covariate_mode != CovariateMode::none;
  const bool ss = with_cov && cfg.covariate_mode == CovariateMode::spike_slab;
  const int q = with_cov ? p + 1 : 1;
  std::vector<std::string> names;
  for (int k = 0; k < q; ++k) names.push_back("beta" + std::to_string(k));
  if (ss)
    for (int k = 1; k < q; ++k) names.push_back("gamma" + std::to_string(k));
  names.emplace_back("phi");
  names.emplace_back("sigma0_sq");
  for (int k = 0; k < q; ++k)
    names.push_back("beta_omega" + std::to_string(k));
  names.emplace_back("sigma_omega");
  names.emplace_back("n_occupied");

  Eigen::MatrixXd samples(mcmc.keep, static_cast<int>(names.size()));
  ComponentTable comps;
  comps.offsets.reserve(static_cast<std::size_t>(mcmc.keep) + 1);
  comps.offsets.push_back(0);
  for (int t = 0; t < mcmc.keep; ++t) {
    for (int u = 0; u < mcmc.thin; ++u) sampler.sweep(s, rng);
    int c = 0;
    for (int k = 0; k < q; ++k) samples(t, c++) = s.beta(k);
    if (ss)
      for (int k = 1; k < q; ++k)
        samples(t, c++) = s.gamma[static_cast<std::size_t>(k - 1)];
    samples(t, c++) = s.phi;
    samples(t, c++) = s.sigma0_sq;
    for (int k = 0; k < q; ++k) samples(t, c++) = s.beta_omega(k);
    samples(t, c++) = s.sigma_omega;
    samples(t, c++) = static_cast<double>(s.mu0.size());
    for (const auto& [j, mu] : s.mu0) {  // std::map keeps indices sorted
      comps.index.push_back(j);
      comps.mu.push_back(mu);
    }
    comps.offsets.push_back(static_cast<int>(comps.index.size()));
  }

  DrawsMeta meta;
  meta.model_label = cfg.label(p);
  meta.seed = mcmc.seed;
  meta.burn = mcmc.burn;
  meta.keep = mcmc.keep;
  meta.thin = mcmc.thin;
  meta.n = d.n();
  meta.p = p;
  meta.window_sample = cfg.window_sample;
  meta.window_predict = cfg.window_predict;
  meta.runtime_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return BnpDraws(cfg, std::move(names), std::move(samples), std::move(comps),
                  std::move(meta));
}

}  // namespace bmeta
