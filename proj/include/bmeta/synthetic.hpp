#ifndef BMETA_SYNTHETIC_HPP
#define BMETA_SYNTHETIC_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bmeta/dataset.hpp"

namespace bmeta {

enum class GenKind {
  fixed_effects,
  random_effects_2l,
  random_effects_3l,
  dependent_2l,
  bimodal,
};

GenKind gen_kind_from_name(const std::string& name);
std::string gen_kind_name(GenKind k);

// Recovery-test generator. Covariates are iid standard normal, sampling
// variances iid Uniform(var_lo, var_hi), y from the chosen generating model.
// `groups` spreads records round-robin over that many studies (0 means each
// record is its own study). The bimodal kind draws intercepts from an equal
// mixture of N(mode_lo, within) and N(mode_hi, within); when covariate_linked
// and p >= 1, cluster membership is the sign of the first covariate.
struct SyntheticSpec {
  GenKind kind = GenKind::fixed_effects;
  int n = 100;
  int p = 0;
  double beta0 = 0.5;
  Eigen::VectorXd slopes;  // size <= p; missing entries are zero
  double sigma0_sq = 0;
  double sigma00_sq = 0;
  double psi = 0;
  int groups = 0;
  double var_lo = 0.01, var_hi = 0.25;
  double mode_lo = -2, mode_hi = 2, mode_within_var = 0.1;
  bool covariate_linked = true;
};

struct SyntheticTruth {
  SyntheticSpec spec;
  std::uint64_t seed = 0;
  std::vector<int> cluster;  // bimodal kind: 0/1 per record
};

std::pair<MetaDataset, SyntheticTruth> generate_synthetic(
    const SyntheticSpec& spec, std::uint64_t seed);

}  // namespace bmeta

#endif
