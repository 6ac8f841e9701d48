#include "bmeta/normal_model.hpp"

#include <chrono>
#include <cmath>

#include "bmeta/errors.hpp"
#include "bmeta/util.hpp"

namespace bmeta {

namespace {

double logistic(double w) { return 1.0 / (1.0 + std::exp(-w)); }

double logit(double p) { return std::log(p) - std::log1p(-p); }

}  // namespace

std::string model_kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::FE: return "FE";
    case ModelKind::RE2L: return "2L";
    case ModelKind::RE2LDep: return "D2L";
    case ModelKind::RE3L: return "3L";
  }
  return "?";
}

std::string grouping_name(Grouping g) {
  return g == Grouping::by_report ? "by-report" : "by-study";
}

std::string covariate_mode_name(CovariateMode m) {
  switch (m) {
    case CovariateMode::none: return "none";
    case CovariateMode::all: return "all";
    case CovariateMode::spike_slab: return "spike-slab";
  }
  return "?";
}

std::string NormalModelSpec::label() const {
  std::string s = model_kind_name(kind);
  switch (covariate_mode) {
    case CovariateMode::none: s += "-0"; break;
    case CovariateMode::all: s += "-x"; break;
    case CovariateMode::spike_slab: s += "-ss"; break;
  }
  if (kind == ModelKind::RE2L)
    s += " (" + grouping_name(grouping) + ")";
  return s;
}

NormalSampler::NormalSampler(const MetaDataset& d, NormalModelSpec spec)
    : d_(d), spec_(std::move(spec)) {
  spec_.priors.validate();
  const int n = d_.n(), p = d_.p();
  q_ = spec_.covariate_mode == CovariateMode::none ? 1 : p + 1;
  xd_.resize(n, q_);
  xd_.col(0).setOnes();
  if (q_ > 1) xd_.rightCols(p) = d_.covariates;

  groups_ = d_.study_groups();
  group_of_ = d_.study_index();

  switch (spec_.kind) {
    case ModelKind::FE: n_mu0_ = 0; break;
    case ModelKind::RE2L:
      n_mu0_ = spec_.grouping == Grouping::by_study
                   ? static_cast<int>(groups_.size())
                   : n;
      break;
    case ModelKind::RE2LDep:
    case ModelKind::RE3L:
      n_mu0_ = n;
      break;
  }

  c0_ = std::sqrt(static_cast<double>(n) / d_.var.cwiseInverse().sum());
  for (const auto& g : groups_) k_ = std::max(k_, static_cast<int>(g.size()));
  if (spec_.kind == ModelKind::RE2LDep && k_ < 2)
    throw DomainError(
        "dependent 2-level model needs at least one study with 2+ reports");
}

NormalState NormalSampler::initial_state(Rng& rng) const {
  NormalState s;
  Eigen::VectorXd pv = Eigen::VectorXd::Constant(q_, spec_.priors.v_intercept);
  if (spec_.covariate_mode == CovariateMode::spike_slab)
    for (int k = 1; k < q_; ++k) pv(k) = spec_.priors.v_slab;
  s.beta =
      linreg_conditional(xd_, d_.y, d_.var.cwiseInverse(), pv).mean;
  if (spec_.covariate_mode == CovariateMode::spike_slab)
    s.gamma.assign(static_cast<std::size_t>(q_ - 1), 1);
  s.mu0 = Eigen::VectorXd::Zero(n_mu0_);
  if (spec_.kind != ModelKind::FE) {
    const double sdy = std::sqrt(sample_variance(
        std::span<const double>(d_.y.data(), static_cast<std::size_t>(d_.n()))));
    double s0 = std::clamp(0.5 * sdy, 1e-3, 0.9 * spec_.priors.b0);
    s.sigma0_sq = s0 * s0;
    if (spec_.kind == ModelKind::RE3L) {
      s.mu00 = Eigen::VectorXd::Zero(static_cast<int>(groups_.size()));
      double s00 = std::clamp(0.25 * sdy, 1e-3, 0.9 * spec_.priors.b00);
      s.sigma00_sq = s00 * s00;
    }
  }
  s.psi = 0;
  (void)rng;
  return s;
}

Eigen::VectorXd NormalSampler::intercept_contribution(
    const NormalState& s) const {
  const int n = d_.n();
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  if (spec_.kind == ModelKind::FE) return c;
  if (spec_.kind == ModelKind::RE2L && spec_.grouping == Grouping::by_study) {
    for (int i = 0; i < n; ++i)
      c(i) = s.mu0(group_of_[static_cast<std::size_t>(i)]);
  } else {
    c = s.mu0;
  }
  if (spec_.kind == ModelKind::RE3L)
    for (int i = 0; i < n; ++i)
      c(i) += s.mu00(group_of_[static_cast<std::size_t>(i)]);
  return c;
}

LinRegConditional NormalSampler::beta_full_conditional(
    const NormalState& s) const {
  const Eigen::VectorXd r = d_.y - intercept_contribution(s);
  Eigen::VectorXd pv = Eigen::VectorXd::Constant(q_, spec_.priors.v_intercept);
  if (spec_.covariate_mode == CovariateMode::spike_slab)
    for (int k = 1; k < q_; ++k)
      pv(k) = s.gamma[static_cast<std::size_t>(k - 1)] ? spec_.priors.v_slab
                                                       : spec_.priors.v_spike;
  return linreg_conditional(xd_, r, d_.var.cwiseInverse(), pv);
}

void NormalSampler::update_beta_gamma(NormalState& s, Rng& rng) const {
  const Eigen::VectorXd r = d_.y - intercept_contribution(s);
  Eigen::VectorXd pv = Eigen::VectorXd::Constant(q_, spec_.priors.v_intercept);
  if (spec_.covariate_mode == CovariateMode::spike_slab)
    for (int k = 1; k < q_; ++k)
      pv(k) = s.gamma[static_cast<std::size_t>(k - 1)] ? spec_.priors.v_slab
                                                       : spec_.priors.v_spike;
  s.beta = linreg_draw(xd_, r, d_.var.cwiseInverse(), pv, rng);
  if (spec_.covariate_mode == CovariateMode::spike_slab && q_ > 1) {
    ssvs_gamma_draw(s.beta.tail(q_ - 1), spec_.priors.v_slab,
                    spec_.priors.v_spike, spec_.priors.bernoulli_p, rng,
                    s.gamma);
  }
}

void NormalSampler::update_random_intercepts(NormalState& s, Rng& rng) const {
  if (spec_.kind == ModelKind::FE) return;
  const int n = d_.n();
  const Eigen::VectorXd xb = xd_ * s.beta;

  auto conj_normal = [&](double sw, double swr, double prior_var) {
    const double prior_prec = 1.0 / prior_var;
    if (!std::isfinite(prior_prec)) return 0.0;
    const double prec = prior_prec + sw;
    return rng.normal(swr / prec, std::sqrt(1.0 / prec));
  };

  if (spec_.kind == ModelKind::RE2L) {
    if (spec_.grouping == Grouping::by_study) {
      for (std::size_t g = 0; g < groups_.size(); ++g) {
        double sw = 0, swr = 0;
        for (int i : groups_[g]) {
          const double w = 1.0 / d_.var(i);
          sw += w;
          swr += w * (d_.y(i) - xb(i));
        }
        s.mu0(static_cast<int>(g)) = conj_normal(sw, swr, s.sigma0_sq);
      }
    } else {
      for (int i = 0; i < n; ++i) {
        const double w = 1.0 / d_.var(i);
        s.mu0(i) = conj_normal(w, w * (d_.y(i) - xb(i)), s.sigma0_sq);
      }
    }
    return;
  }

  if (spec_.kind == ModelKind::RE3L) {
    for (int i = 0; i < n; ++i) {
      const double w = 1.0 / d_.var(i);
      const double r = d_.y(i) - xb(i) -
                       s.mu00(group_of_[static_cast<std::size_t>(i)]);
      s.mu0(i) = conj_normal(w, w * r, s.sigma0_sq);
    }
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      double sw = 0, swr = 0;
      for (int i : groups_[g]) {
        const double w = 1.0 / d_.var(i);
        sw += w;
        swr += w * (d_.y(i) - xb(i) - s.mu0(i));
      }
      s.mu00(static_cast<int>(g)) = conj_normal(sw, swr, s.sigma00_sq);
    }
    return;
  }

  // dependent intercepts: block multivariate normal per study
  for (const auto& grp : groups_) {
    const int g = static_cast<int>(grp.size());
    if (g == 1) {
      const int i = grp[0];
      const double w = 1.0 / d_.var(i);
      s.mu0(i) = conj_normal(w, w * (d_.y(i) - xb(i)), s.sigma0_sq);
      continue;
    }
    const double dcoef = s.sigma0_sq - s.psi;
    const double tail = s.sigma0_sq + (g - 1) * s.psi;
    // prior precision of the block: (1/d)(I - (psi/tail) J)
    Eigen::MatrixXd prec =
        Eigen::MatrixXd::Constant(g, g, -s.psi / (dcoef * tail));
    Eigen::VectorXd rhs(g);
    for (int a = 0; a < g; ++a) {
      const int i = grp[static_cast<std::size_t>(a)];
      const double w = 1.0 / d_.var(i);
      prec(a, a) = 1.0 / dcoef - s.psi / (dcoef * tail) + w;
      rhs(a) = w * (d_.y(i) - xb(i));
    }
    Eigen::LLT<Eigen::MatrixXd> llt(prec);
    if (llt.info() != Eigen::Success)
      throw NumericalError("dependent-intercept update: block not PD");
    Eigen::VectorXd mean = llt.solve(rhs);
    Eigen::VectorXd z(g);
    for (int a = 0; a < g; ++a) z(a) = rng.normal();
    Eigen::VectorXd draw = mean + llt.matrixU().solve(z);
    for (int a = 0; a < g; ++a) s.mu0(grp[static_cast<std::size_t>(a)]) = draw(a);
  }
}

namespace {

// log full conditional of an intercept scale sigma given G intercepts with
// sum of squares ss, before the prior factor
double scale_loglik(double sigma, int g, double ss) {
  return -g * std::log(sigma) - 0.5 * ss / (sigma * sigma);
}

double draw_scale(double current_sq, int g, double ss, const PriorConfig& pr,
                  double bound, Rng& rng) {
  if (pr.variance_prior == VariancePrior::inv_gamma) {
    const double prec =
        rng.gamma(pr.inv_gamma_eps + 0.5 * g, pr.inv_gamma_eps + 0.5 * ss);
    return 1.0 / prec;
  }
  double sigma = std::sqrt(std::max(current_sq, 1e-12));
  if (pr.variance_prior == VariancePrior::uniform) {
    sigma = std::clamp(sigma, 1e-9 * bound, (1.0 - 1e-12) * bound);
    auto logf = [&](double x) { return scale_loglik(x, g, ss); };
    sigma = slice_sample_bounded(sigma, logf, 0.0, bound, rng);
  } else {  // half-t
    auto logf = [&](double x) {
      const double t = (x / pr.half_t_b);
      return scale_loglik(x, g, ss) -
             0.5 * (pr.half_t_a + 1.0) * std::log1p(t * t / pr.half_t_a);
    };
    sigma = slice_sample_stepout(sigma, logf, 0.0, pr.half_t_b, rng);
  }
  return sigma * sigma;
}

}  // namespace

void NormalSampler::update_variances(NormalState& s, Rng& rng) {
  if (spec_.kind == ModelKind::FE) return;
  if (spec_.kind == ModelKind::RE2LDep) {
    update_variances_dependent(s, rng);
    return;
  }
  s.sigma0_sq = draw_scale(s.sigma0_sq, n_mu0_, s.mu0.squaredNorm(),
                           spec_.priors, spec_.priors.b0, rng);
  if (spec_.kind == ModelKind::RE3L)
    s.sigma00_sq =
        draw_scale(s.sigma00_sq, static_cast<int>(groups_.size()),
                   s.mu00.squaredNorm(), spec_.priors, spec_.priors.b00, rng);
}

void NormalSampler::update_variances_dependent(NormalState& s, Rng& rng) {
  const double km1 = static_cast<double>(k_ - 1);

  auto block_loglik = [&](double s0sq, double psi) {
    double ll = 0;
    for (const auto& grp : groups_) {
      const int g = static_cast<int>(grp.size());
      double sum = 0, ss = 0;
      for (int i : grp) {
        sum += s.mu0(i);
        ss += s.mu0(i) * s.mu0(i);
      }
      if (g == 1) {
        ll += -0.5 * (std::log(s0sq) + ss / s0sq);
        continue;
      }
      const double dcoef = s0sq - psi;
      const double tail = s0sq + (g - 1) * psi;
      const double quad = (ss - psi * sum * sum / tail) / dcoef;
      ll += -0.5 * ((g - 1) * std::log(dcoef) + std::log(tail) + quad);
    }
    return ll;
  };

  // reparameterize to unconstrained (u, w): sigma0^2 = e^u and psi sweeps
  // its support (-sigma0^2/(K-1), sigma0^2) through a logistic in w
  auto log_target = [&](double u, double w) {
    const double s0sq = std::exp(u);
    const double sw = logistic(w);
    const double psi = s0sq * (-1.0 / km1 + (1.0 + 1.0 / km1) * sw);
    const double log_prior =
        std::log(c0_) - 2.0 * std::log(c0_ + s0sq) + std::log(s0sq);
    const double log_jac = std::log(sw) + std::log1p(-sw);
    return block_loglik(s0sq, psi) + log_prior + log_jac;
  };

  const double u = std::log(s.sigma0_sq);
  const double frac = (s.psi / s.sigma0_sq + 1.0 / km1) / (1.0 + 1.0 / km1);
  const double w = logit(std::clamp(frac, 1e-12, 1.0 - 1e-12));

  const double u1 = u + mh_scale_u_ * rng.normal();
  const double w1 = w + mh_scale_w_ * rng.normal();
  const double log_a = log_target(u1, w1) - log_target(u, w);
  ++mh_proposals_;
  if (std::log(rng.uniform()) < log_a) {
    ++mh_accepts_;
    s.sigma0_sq = std::exp(u1);
    const double sw = logistic(w1);
    s.psi = s.sigma0_sq * (-1.0 / km1 + (1.0 + 1.0 / km1) * sw);
  }
  if (adapting_ && mh_proposals_ % 50 == 0) {
    const double rate =
        static_cast<double>(mh_accepts_) / static_cast<double>(mh_proposals_);
    const double adj = std::exp(0.5 * (rate - 0.35));
    mh_scale_u_ = std::clamp(mh_scale_u_ * adj, 1e-3, 10.0);
    mh_scale_w_ = std::clamp(mh_scale_w_ * adj, 1e-3, 10.0);
  }
}

double NormalSampler::mh_acceptance_rate() const {
  return mh_proposals_ > 0 ? static_cast<double>(mh_accepts_) /
                                 static_cast<double>(mh_proposals_)
                           : 0.0;
}

void NormalSampler::sweep(NormalState& s, Rng& rng) {
  update_beta_gamma(s, rng);
  update_random_intercepts(s, rng);
  update_variances(s, rng);
}

PredMoments predictive_moments(const NormalModelSpec& spec,
                               const NormalState& s,
                               const Eigen::VectorXd& xcov, double sigma_sq) {
  double mean = s.beta(0);
  for (int k = 1; k < s.beta.size(); ++k) mean += s.beta(k) * xcov(k - 1);
  double var = sigma_sq;
  if (spec.kind != ModelKind::FE) var += s.sigma0_sq;
  if (spec.kind == ModelKind::RE3L) var += s.sigma00_sq;
  return {mean, var};
}

NormalDraws::NormalDraws(NormalModelSpec spec, std::vector<std::string> names,
                         Eigen::MatrixXd samples, DrawsMeta meta)
    : spec_(std::move(spec)) {
  names_ = std::move(names);
  samples_ = std::move(samples);
  meta_ = std::move(meta);
  n_coefs_ = spec_.covariate_mode == CovariateMode::none ? 1 : meta_.p + 1;
  idx_beta_ = param_index("beta0");
  idx_s0_ = spec_.kind == ModelKind::FE ? -1 : param_index("sigma0_sq");
  idx_s00_ = spec_.kind == ModelKind::RE3L ? param_index("sigma00_sq") : -1;
}

PredMoments NormalDraws::draw_moments(int s, const Eigen::VectorXd& xcov,
                                      double sigma_sq) const {
  double mean = samples_(s, idx_beta_);
  for (int k = 1; k < n_coefs_; ++k)
    mean += samples_(s, idx_beta_ + k) * xcov(k - 1);
  double var = sigma_sq;
  if (idx_s0_ >= 0) var += samples_(s, idx_s0_);
  if (idx_s00_ >= 0) var += samples_(s, idx_s00_);
  return {mean, var};
}

void NormalDraws::accumulate_draw_density(int s, std::span<const double> ygrid,
                                          const Eigen::VectorXd& xcov,
                                          double sigma_sq,
                                          std::span<double> out) const {
  const auto pm = draw_moments(s, xcov, sigma_sq);
  for (std::size_t i = 0; i < ygrid.size(); ++i)
    out[i] += norm_pdf(ygrid[i], pm.mean, pm.var);
}

NormalDraws fit_normal(const NormalModelSpec& spec, const MetaDataset& d,
                       const McmcConfig& mcmc) {
  if (mcmc.keep < 1 || mcmc.thin < 1 || mcmc.burn < 0)
    throw DomainError("fit_normal: invalid mcmc settings");
  const auto t0 = std::chrono::steady_clock::now();
  NormalSampler sampler(d, spec);
  Rng rng(mcmc.seed);
  NormalState s = sampler.initial_state(rng);

  sampler.set_adapting(true);
  for (int it = 0; it < mcmc.burn; ++it) sampler.sweep(s, rng);
  sampler.set_adapting(false);

  std::vector<std::string> names;
  const int q = sampler.n_active_coefs();
  for (int k = 0; k < q; ++k) names.push_back("beta" + std::to_string(k));
  const bool ss = spec.covariate_mode == CovariateMode::spike_slab;
  if (ss)
    for (int k = 1; k < q; ++k) names.push_back("gamma" + std::to_string(k));
  const bool l2 = spec.kind != ModelKind::FE;
  if (l2) {
    names.emplace_back("sigma0_sq");
    names.emplace_back("mean_mu0");
  }
  if (spec.kind == ModelKind::RE2LDep) names.emplace_back("psi");
  if (spec.kind == ModelKind::RE3L) {
    names.emplace_back("sigma00_sq");
    names.emplace_back("mean_mu00");
  }

  Eigen::MatrixXd samples(mcmc.keep, static_cast<int>(names.size()));
  for (int t = 0; t < mcmc.keep; ++t) {
    for (int u = 0; u < mcmc.thin; ++u) sampler.sweep(s, rng);
    int c = 0;
    for (int k = 0; k < q; ++k) samples(t, c++) = s.beta(k);
    if (ss)
      for (int k = 1; k < q; ++k)
        samples(t, c++) = s.gamma[static_cast<std::size_t>(k - 1)];
    if (l2) {
      samples(t, c++) = s.sigma0_sq;
      samples(t, c++) = s.mu0.size() > 0 ? s.mu0.mean() : 0.0;
    }
    if (spec.kind == ModelKind::RE2LDep) samples(t, c++) = s.psi;
    if (spec.kind == ModelKind::RE3L) {
      samples(t, c++) = s.sigma00_sq;
      samples(t, c++) = s.mu00.size() > 0 ? s.mu00.mean() : 0.0;
    }
  }

  DrawsMeta meta;
  meta.model_label = spec.label();
  meta.seed = mcmc.seed;
  meta.burn = mcmc.burn;
  meta.keep = mcmc.keep;
  meta.thin = mcmc.thin;
  meta.n = d.n();
  meta.p = d.p();
  meta.runtime_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return NormalDraws(spec, std::move(names), std::move(samples),
                     std::move(meta));
}

}  // namespace bmeta
