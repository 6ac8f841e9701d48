#ifndef BMETA_EVAL_HPP
#define BMETA_EVAL_HPP

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "bmeta/dataset.hpp"
#include "bmeta/diagnostics.hpp"
#include "bmeta/mcmc.hpp"

namespace bmeta {

// Evaluation kernels come in a serial reference flavor and an OpenMP flavor.
// Work is partitioned over grid points / observations only, so both flavors
// produce bit-identical results for any thread count.
enum class Exec { serial, parallel };

// Posterior predictive density on a y grid: the draw-average of per-draw
// conditional densities at covariates xcov and sampling variance sigma_sq.
DensityGrid posterior_predictive_density(const FittedModel& fm,
                                         const Eigen::VectorXd& xcov,
                                         double sigma_sq,
                                         std::span<const double> ygrid,
                                         Exec exec = Exec::parallel);

// Default evaluation grid: `points` values spanning the observed y range
// widened by 4 predictive standard deviations at xcov.
std::vector<double> default_y_grid(const FittedModel& fm,
                                   const MetaDataset& d,
                                   const Eigen::VectorXd& xcov,
                                   double sigma_sq, int points = 512);

// Per-observation predictive mean and variance, averaged over draws with the
// law of total variance (Var = mean of draw variances + variance of draw
// means, population divisor).
struct MomentTable {
  Eigen::VectorXd e;
  Eigen::VectorXd v;
};
MomentTable predictive_moment_table(const FittedModel& fm,
                                    const MetaDataset& d,
                                    Exec exec = Exec::parallel);

// Mean-square posterior predictive error: D_i = (y_i - E_i)^2 + Var_i,
// summed over observations. Square roots reported on the original scale.
struct DReport {
  std::string label;
  double d = 0;
  double sqrt_d = 0;
  Eigen::VectorXd d_i;
  Eigen::VectorXd sqrt_d_i;
  std::string dataset_hash;
  std::string config_hash;
  std::uint64_t seed = 0;
  int n = 0;
};
DReport d_criterion(const FittedModel& fm, const MetaDataset& d,
                    Exec exec = Exec::parallel);

// Batch-means Monte Carlo standard error with floor(sqrt(N)) batches.
// halfwidth95 = 1.96 * mcse; stabilized when the half-width is within the
// threshold (default .1).
struct McseResult {
  double mcse;
  double halfwidth95;
  bool stabilized;
};
McseResult mc_diagnostics(std::span<const double> trace,
                          double threshold = 0.1);

struct FiveNum {
  double min, q1, med, q3, max;
};
FiveNum five_number(std::span<const double> values);

struct ComparisonEntry {
  DReport report;
  FiveNum sqrt_di_summary;
  int outlier_count;  // sqrt(D_i) beyond Q3 + 1.5 IQR
};

struct ComparisonReport {
  std::vector<ComparisonEntry> ranked;  // ascending D
};
ComparisonReport compare(std::vector<DReport> reports);

// Posterior summaries of every retained scalar parameter.
struct ParamSummary {
  std::string name;
  double mean, sd, q025, q50, q975;
  double mcse, halfwidth95;
  bool stabilized;
};
std::vector<ParamSummary> summarize(const FittedModel& fm,
                                    double halfwidth_threshold = 0.1);

}  // namespace bmeta

#endif
