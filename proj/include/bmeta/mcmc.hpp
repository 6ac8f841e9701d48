#ifndef BMETA_MCMC_HPP
#define BMETA_MCMC_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bmeta {

struct McmcConfig {
  int burn = 20000;
  int keep = 200000;
  int thin = 1;
  std::uint64_t seed = 42;
};

struct DrawsMeta {
  std::string model_label;
  std::uint64_t seed = 0;
  int burn = 0, keep = 0, thin = 0;
  double runtime_sec = 0;
  std::string dataset_hash;
  std::string config_hash;
  int n = 0, p = 0;
  int window_sample = 6, window_predict = 8;
  std::string k_convention = "group-size";
};

struct PredMoments {
  double mean;
  double var;
};

// Retained posterior draws plus enough structure to evaluate, for any draw,
// the conditional effect-size density and its first two moments at a chosen
// covariate point and sampling variance. Implementations are immutable after
// construction; evaluation is safe to run concurrently.
class FittedModel {
 public:
  virtual ~FittedModel() = default;

  int n_draws() const { return static_cast<int>(samples_.rows()); }

  virtual PredMoments draw_moments(int s, const Eigen::VectorXd& xcov,
                                   double sigma_sq) const = 0;

  // Adds draw s's conditional density evaluated over ygrid into out.
  virtual void accumulate_draw_density(int s, std::span<const double> ygrid,
                                       const Eigen::VectorXd& xcov,
                                       double sigma_sq,
                                       std::span<double> out) const = 0;

  const DrawsMeta& meta() const { return meta_; }
  const std::vector<std::string>& param_names() const { return names_; }
  const Eigen::MatrixXd& samples() const { return samples_; }

  int param_index(const std::string& name) const;
  // Contiguous view of one scalar parameter's retained draws.
  std::span<const double> trace(const std::string& name) const;

 protected:
  DrawsMeta meta_;
  std::vector<std::string> names_;
  Eigen::MatrixXd samples_;  // keep x P, column per parameter
};

}  // namespace bmeta

#endif
