#ifndef BMETA_SAMPLING_HPP
#define BMETA_SAMPLING_HPP

#include <Eigen/Dense>
#include <span>
#include <utility>

#include "bmeta/rng.hpp"

namespace bmeta {

// Exact multivariate-normal draw from the conditional of coefficients in a
// heteroscedastic normal regression r_i ~ N(x_i'b, 1/w_i) with independent
// N(0, prior_var_k) priors. Also returns the conditional mean and covariance
// so tests can check them against direct solves.
struct LinRegConditional {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

LinRegConditional linreg_conditional(const Eigen::MatrixXd& x,
                                     const Eigen::VectorXd& r,
                                     const Eigen::VectorXd& w,
                                     const Eigen::VectorXd& prior_var);

Eigen::VectorXd linreg_draw(const Eigen::MatrixXd& x, const Eigen::VectorXd& r,
                            const Eigen::VectorXd& w,
                            const Eigen::VectorXd& prior_var, Rng& rng);

// Stochastic-search indicator update: each gamma_k is Bernoulli with odds
// p/(1-p) * n(beta_k|0,v1) / n(beta_k|0,v0), independently given the slopes.
void ssvs_gamma_draw(const Eigen::VectorXd& slopes, double v_slab,
                     double v_spike, double bernoulli_p, Rng& rng,
                     std::span<int> gamma);

// Joint normal-gamma draw for a regression z = X b + e, e ~ N(0, s^2),
// with b | s^2 ~ N(0, s^2 c I) and s^-2 ~ Gamma(a0, b0).
// Returns (b, s). Handles the prior-only case of zero rows.
std::pair<Eigen::VectorXd, double> nig_regression_draw(
    const Eigen::MatrixXd& x, const Eigen::VectorXd& z, double c, double a0,
    double b0, Rng& rng);

}  // namespace bmeta

#endif
