#include "bmeta/synthetic.hpp"

#include <cmath>

#include "bmeta/errors.hpp"
#include "bmeta/rng.hpp"

namespace bmeta {

GenKind gen_kind_from_name(const std::string& name) {
  if (name == "fe") return GenKind::fixed_effects;
  if (name == "re2l") return GenKind::random_effects_2l;
  if (name == "re3l") return GenKind::random_effects_3l;
  if (name == "d2l") return GenKind::dependent_2l;
  if (name == "bimodal") return GenKind::bimodal;
  throw DomainError("unknown generator kind '" + name + "'");
}

std::string gen_kind_name(GenKind k) {
  switch (k) {
    case GenKind::fixed_effects: return "fe";
    case GenKind::random_effects_2l: return "re2l";
    case GenKind::random_effects_3l: return "re3l";
    case GenKind::dependent_2l: return "d2l";
    case GenKind::bimodal: return "bimodal";
  }
  return "?";
}

std::pair<MetaDataset, SyntheticTruth> generate_synthetic(
    const SyntheticSpec& spec, std::uint64_t seed) {
  if (spec.n < 1) throw DomainError("generate_synthetic: n must be >= 1");
  if (spec.p < 0) throw DomainError("generate_synthetic: p must be >= 0");
  if (!(spec.var_hi >= spec.var_lo) || !(spec.var_lo > 0))
    throw DomainError("generate_synthetic: bad variance range");

  Rng rng(seed);
  const int n = spec.n, p = spec.p;
  const int n_groups = spec.groups > 0 ? std::min(spec.groups, n) : n;

  MetaDataset d;
  d.y.resize(n);
  d.var.resize(n);
  d.covariates.resize(n, p);
  for (int k = 0; k < p; ++k)
    d.covariate_names.push_back("x" + std::to_string(k + 1));

  Eigen::VectorXd slopes = Eigen::VectorXd::Zero(p);
  for (int k = 0; k < std::min<int>(p, static_cast<int>(spec.slopes.size()));
       ++k)
    slopes(k) = spec.slopes(k);

  SyntheticTruth truth;
  truth.spec = spec;
  truth.seed = seed;

  // study-level intercepts first so record draws stay aligned across kinds
  Eigen::VectorXd mu00 = Eigen::VectorXd::Zero(n_groups);
  if (spec.kind == GenKind::random_effects_3l) {
    const double s00 = std::sqrt(spec.sigma00_sq);
    for (int g = 0; g < n_groups; ++g) mu00(g) = rng.normal(0.0, 1.0) * s00;
  }
  // dependent intercepts come from the equicorrelated decomposition
  // mu = a z_study + b z_record with a^2 = psi, a^2 + b^2 = sigma0^2
  if (spec.kind == GenKind::dependent_2l &&
      (!(spec.psi >= 0) || spec.psi > spec.sigma0_sq))
    throw DomainError("generate_synthetic: need 0 <= psi <= sigma0_sq");

  const double s0 = std::sqrt(std::max(0.0, spec.sigma0_sq));
  const double shared_sd = std::sqrt(std::max(0.0, spec.psi));
  const double own_sd = std::sqrt(std::max(0.0, spec.sigma0_sq - spec.psi));
  Eigen::VectorXd shared = Eigen::VectorXd::Zero(n_groups);
  if (spec.kind == GenKind::dependent_2l)
    for (int g = 0; g < n_groups; ++g)
      shared(g) = rng.normal(0.0, 1.0) * shared_sd;

  for (int i = 0; i < n; ++i) {
    const int g = i % n_groups;
    for (int k = 0; k < p; ++k) d.covariates(i, k) = rng.normal();
    d.var(i) = rng.uniform(spec.var_lo, spec.var_hi);

    double mean = spec.beta0;
    for (int k = 0; k < p; ++k) mean += slopes(k) * d.covariates(i, k);

    // one intercept innovation per record in every kind, so degenerate
    // settings (e.g. sigma0_sq = 0) reproduce the simpler kinds exactly
    const double z_int = rng.normal();
    switch (spec.kind) {
      case GenKind::fixed_effects:
        break;
      case GenKind::random_effects_2l:
        mean += z_int * s0;
        break;
      case GenKind::random_effects_3l:
        mean += z_int * s0 + mu00(g);
        break;
      case GenKind::dependent_2l:
        mean += shared(g) + z_int * own_sd;
        break;
      case GenKind::bimodal: {
        // intercept replaces beta0 entirely: an equal two-cluster mixture
        int cluster;
        if (spec.covariate_linked && p >= 1)
          cluster = d.covariates(i, 0) > 0 ? 1 : 0;
        else
          cluster = rng.bernoulli(0.5) ? 1 : 0;
        truth.cluster.push_back(cluster);
        const double center = cluster ? spec.mode_hi : spec.mode_lo;
        mean = center + (mean - spec.beta0) +
               z_int * std::sqrt(spec.mode_within_var);
        break;
      }
    }
    d.y(i) = mean + rng.normal(0.0, 1.0) * std::sqrt(d.var(i));
    d.study.push_back("s" + std::to_string(g + 1));
    d.report.push_back("r" + std::to_string(i + 1));
  }
  return {std::move(d), std::move(truth)};
}

}  // namespace bmeta
