#ifndef BMETA_PRIORS_HPP
#define BMETA_PRIORS_HPP

namespace bmeta {

enum class VariancePrior { uniform, inv_gamma, half_t };

// Shared prior settings. Defaults are the common-footing choices used for
// cross-model comparison: diffuse normal intercept, .001/10 spike/slab with
// Bernoulli(.5) inclusion, Un(0,100) on intercept scales.
struct PriorConfig {
  double v_intercept = 1e5;
  double v_spike = 0.001;  // v0
  double v_slab = 10.0;    // v1
  double bernoulli_p = 0.5;
  double b0 = 100.0;   // uniform bound for sigma_0
  double b00 = 100.0;  // uniform bound for sigma_00
  VariancePrior variance_prior = VariancePrior::uniform;
  double inv_gamma_eps = 0.001;
  double half_t_a = 4.0;
  double half_t_b = 1.0;
  // infinite-mixture model extras
  double a_phi = 0.5;      // gamma(a/2, a/2) on the inverse dispersion
  double v_weight = 1e5;   // scale multiplier of the weight-regression slab

  void validate() const;
};

}  // namespace bmeta

#endif
