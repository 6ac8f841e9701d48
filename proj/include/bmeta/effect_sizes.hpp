#ifndef BMETA_EFFECT_SIZES_HPP
#define BMETA_EFFECT_SIZES_HPP

namespace bmeta {

struct EffectSizeResult {
  double es;
  double var;
};

// Unbiased standardized mean difference for two independent groups, with the
// small-sample factor c* = 1 - 3/(4(n1+n2-2)-1). The variance multiplies by
// c* once; `literature_variant` switches to the c*^2 form found elsewhere.
EffectSizeResult hedges_g(double mean1, double mean2, double var1, double var2,
                          int n1, int n2, bool literature_variant = false);

// Fisher z transform of a correlation. Variance 1/(n+3);
// `literature_variant` uses 1/(n-3) and then requires n >= 4.
EffectSizeResult fisher_z(double rho, int n, bool literature_variant = false);

// Log odds ratio from a 2x2 table of counts. Zero cells are an error; no
// continuity correction is applied.
EffectSizeResult log_odds_ratio(double n11, double n10, double n01,
                                double n00);

// Twin-study heritability 2(rho_mz - rho_dz) with its large-sample variance.
// Negative estimates are valid results, not errors.
EffectSizeResult falconer_heritability(double rho_mz, int n_mz, double rho_dz,
                                       int n_dz);

}  // namespace bmeta

#endif
