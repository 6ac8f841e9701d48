#ifndef BMETA_BNP_MODEL_HPP
#define BMETA_BNP_MODEL_HPP

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "bmeta/dataset.hpp"
#include "bmeta/mcmc.hpp"
#include "bmeta/normal_model.hpp"
#include "bmeta/priors.hpp"
#include "bmeta/rng.hpp"

namespace bmeta {

// Mixture weights of the infinite random-intercepts model: component j
// carries the probability mass a Normal(eta, sigma_omega^2) variable puts on
// (j-1, j], i.e. a difference of two standard normal CDF values. Only the
// window [floor(eta - W s), ceil(eta + W s)] is materialized; the omitted
// tail mass is at most 2 Phi(-W).
struct WeightWindow {
  int j_lo = 0;
  std::vector<double> w;

  int j_hi() const { return j_lo + static_cast<int>(w.size()) - 1; }
  double sum() const;
  double weight_at(int j) const {
    const int k = j - j_lo;
    return (k >= 0 && k < static_cast<int>(w.size()))
               ? w[static_cast<std::size_t>(k)]
               : 0.0;
  }
};

WeightWindow mixture_weights(double eta, double sigma_omega, int window);

struct BnpConfig {
  PriorConfig priors;
  CovariateMode covariate_mode = CovariateMode::spike_slab;
  int window_sample = 6;
  int window_predict = 8;

  std::string label(int p) const;
};

struct BnpState {
  Eigen::VectorXd beta;        // p+1 mean-regression coefficients
  std::vector<int> gamma;      // p inclusion bits (spike_slab mode)
  std::map<int, double> mu0;   // instantiated component intercepts
  double phi = 1;              // dispersion multiplier of sampling variances
  double sigma0_sq = 1;        // intercept prior variance
  Eigen::VectorXd beta_omega;  // p+1 weight-regression coefficients
  double sigma_omega = 1;      // weight dispersion
  std::vector<int> alloc;      // component membership d_i
  std::vector<double> z;       // latent probit variables, z_i in (d_i-1, d_i]
};

class BnpSampler {
 public:
  BnpSampler(const MetaDataset& d, BnpConfig cfg);

  BnpState initial_state() const;
  void sweep(BnpState& s, Rng& rng);

  void update_allocations(BnpState& s, Rng& rng) const;
  void update_latent_probit(BnpState& s, Rng& rng);
  void update_weight_regression(BnpState& s, Rng& rng) const;
  void update_intercepts(BnpState& s, Rng& rng) const;
  void update_beta_gamma(BnpState& s, Rng& rng) const;
  void update_phi(BnpState& s, Rng& rng) const;
  void update_sigma0(BnpState& s, Rng& rng) const;

  // Drops instantiated components no observation is allocated to; they are
  // re-instantiated from the prior whenever a window touches them again.
  void collect_unoccupied(BnpState& s) const;

  // truncated-probit draws that fell outside the representable range and
  // were clamped to a boundary
  long probit_clip_count() const { return probit_clips_; }

  const BnpConfig& config() const { return cfg_; }

 private:
  const MetaDataset& d_;
  BnpConfig cfg_;
  Eigen::MatrixXd xd_;  // n x (p+1), ones column first
  int q_ = 1;
  CovariateMode mode_;
  long probit_clips_ = 0;
};

// Per-draw predictive moments of the windowed mixture at covariates xcov:
// mean sum_j w_j m_j and variance phi sigma_sq + sum_j w_j m_j^2 - mean^2
// with m_j = mu_j + x'beta. Missing components are drawn from their prior.
PredMoments predictive_moments_bnp(const BnpState& s,
                                   const Eigen::VectorXd& xcov,
                                   double sigma_sq, int window, Rng& rng);

// Flat storage of per-draw instantiated components.
struct ComponentTable {
  std::vector<int> offsets;  // keep+1
  std::vector<int> index;
  std::vector<double> mu;
};

class BnpDraws final : public FittedModel {
 public:
  BnpDraws(BnpConfig cfg, std::vector<std::string> names,
           Eigen::MatrixXd samples, ComponentTable components, DrawsMeta meta);

  PredMoments draw_moments(int s, const Eigen::VectorXd& xcov,
                           double sigma_sq) const override;
  void accumulate_draw_density(int s, std::span<const double> ygrid,
                               const Eigen::VectorXd& xcov, double sigma_sq,
                               std::span<double> out) const override;

  const BnpConfig& config() const { return cfg_; }
  const ComponentTable& components() const { return comps_; }

 private:
  struct Mixture {
    std::vector<double> w;
    std::vector<double> m;
    double comp_var;
  };
  Mixture draw_mixture(int s, const Eigen::VectorXd& xcov,
                       double sigma_sq) const;
  double component_mu(int s, int j, double sigma0) const;

  BnpConfig cfg_;
  ComponentTable comps_;
  int idx_beta_ = 0, idx_phi_ = 0, idx_s0_ = 0, idx_bw_ = 0, idx_sw_ = 0;
  int n_coefs_ = 1;
};

BnpDraws fit_bnp(const MetaDataset& d, const BnpConfig& cfg,
                 const McmcConfig& mcmc);

}  // namespace bmeta

#endif
