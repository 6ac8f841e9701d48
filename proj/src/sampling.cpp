#include "bmeta/sampling.hpp"

#include <cmath>
#include <string>

#include "bmeta/errors.hpp"

namespace bmeta {

namespace {

Eigen::LLT<Eigen::MatrixXd> checked_llt(const Eigen::MatrixXd& a,
                                        const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) {
    // report a cheap condition estimate from the diagonal spread
    const double mx = a.diagonal().maxCoeff();
    const double mn = a.diagonal().minCoeff();
    throw NumericalError(std::string(what) +
                         ": conditional precision not positive definite "
                         "(diag ratio " +
                         std::to_string(mx / std::max(mn, 1e-300)) + ")");
  }
  return llt;
}

}  // namespace

LinRegConditional linreg_conditional(const Eigen::MatrixXd& x,
                                     const Eigen::VectorXd& r,
                                     const Eigen::VectorXd& w,
                                     const Eigen::VectorXd& prior_var) {
  const int q = static_cast<int>(x.cols());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(q, q);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(q);
  for (int i = 0; i < x.rows(); ++i) {
    a.noalias() += w(i) * x.row(i).transpose() * x.row(i);
    b.noalias() += w(i) * r(i) * x.row(i).transpose();
  }
  for (int k = 0; k < q; ++k) a(k, k) += 1.0 / prior_var(k);
  auto llt = checked_llt(a, "linreg_conditional");
  LinRegConditional out;
  out.mean = llt.solve(b);
  out.cov = llt.solve(Eigen::MatrixXd::Identity(q, q));
  return out;
}

Eigen::VectorXd linreg_draw(const Eigen::MatrixXd& x, const Eigen::VectorXd& r,
                            const Eigen::VectorXd& w,
                            const Eigen::VectorXd& prior_var, Rng& rng) {
  const int q = static_cast<int>(x.cols());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(q, q);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(q);
  for (int i = 0; i < x.rows(); ++i) {
    a.noalias() += w(i) * x.row(i).transpose() * x.row(i);
    b.noalias() += w(i) * r(i) * x.row(i).transpose();
  }
  for (int k = 0; k < q; ++k) a(k, k) += 1.0 / prior_var(k);
  auto llt = checked_llt(a, "linreg_draw");
  Eigen::VectorXd mean = llt.solve(b);
  Eigen::VectorXd zv(q);
  for (int k = 0; k < q; ++k) zv(k) = rng.normal();
  // a = L L'; solve L' u = z gives u ~ N(0, a^{-1})
  return mean + llt.matrixU().solve(zv);
}

void ssvs_gamma_draw(const Eigen::VectorXd& slopes, double v_slab,
                     double v_spike, double bernoulli_p, Rng& rng,
                     std::span<int> gamma) {
  const double log_odds_prior =
      std::log(bernoulli_p) - std::log1p(-bernoulli_p);
  for (std::size_t k = 0; k < gamma.size(); ++k) {
    const double bk = slopes(static_cast<int>(k));
    const double logit = log_odds_prior +
                         norm_logpdf(bk, 0.0, v_slab) -
                         norm_logpdf(bk, 0.0, v_spike);
    const double p1 = 1.0 / (1.0 + std::exp(-logit));
    gamma[k] = rng.bernoulli(p1) ? 1 : 0;
  }
}

std::pair<Eigen::VectorXd, double> nig_regression_draw(
    const Eigen::MatrixXd& x, const Eigen::VectorXd& z, double c, double a0,
    double b0, Rng& rng) {
  const int q = static_cast<int>(x.cols());
  const int n = static_cast<int>(x.rows());
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(q, q) / c;
  Eigen::VectorXd xtz = Eigen::VectorXd::Zero(q);
  if (n > 0) {
    a.noalias() += x.transpose() * x;
    xtz.noalias() = x.transpose() * z;
  }
  auto llt = checked_llt(a, "nig_regression_draw");
  const Eigen::VectorXd m = llt.solve(xtz);
  double ssr = 0.0;
  if (n > 0) ssr = z.squaredNorm() - m.dot(a * m);
  ssr = std::max(0.0, ssr);
  const double prec = rng.gamma(a0 + 0.5 * n, b0 + 0.5 * ssr);
  const double sigma = 1.0 / std::sqrt(prec);
  Eigen::VectorXd zv(q);
  for (int k = 0; k < q; ++k) zv(k) = rng.normal();
  Eigen::VectorXd beta = m + sigma * llt.matrixU().solve(zv);
  return {std::move(beta), sigma};
}

}  // namespace bmeta
