#include "bmeta/effect_sizes.hpp"

#include <cmath>
#include <string>

#include "bmeta/errors.hpp"

namespace bmeta {

EffectSizeResult hedges_g(double mean1, double mean2, double var1, double var2,
                          int n1, int n2, bool literature_variant) {
  if (n1 < 2 || n2 < 2)
    throw DomainError("hedges_g: group sizes must be at least 2");
  if (var1 < 0 || var2 < 0)
    throw DomainError("hedges_g: group variances must be nonnegative");
  const double df = n1 + n2 - 2;
  const double sp2 = ((n1 - 1) * var1 + (n2 - 1) * var2) / df;
  if (!(sp2 > 0.0))
    throw DegenerateError("hedges_g: pooled variance is zero");
  const double cstar = 1.0 - 3.0 / (4.0 * df - 1.0);
  const double es = (mean1 - mean2) / std::sqrt(sp2) * cstar;
  const double nn = static_cast<double>(n1) + n2;
  const double base = nn / (static_cast<double>(n1) * n2) + es * es / (2.0 * nn);
  const double var = base * (literature_variant ? cstar * cstar : cstar);
  return {es, var};
}

EffectSizeResult fisher_z(double rho, int n, bool literature_variant) {
  if (!(std::abs(rho) < 1.0))
    throw DomainError("fisher_z: correlation must satisfy |rho| < 1");
  if (n < 1) throw DomainError("fisher_z: n must be at least 1");
  if (literature_variant && n <= 3)
    throw DomainError("fisher_z: variance 1/(n-3) needs n >= 4");
  const double es = 0.5 * std::log((1.0 + rho) / (1.0 - rho));
  const double var = literature_variant ? 1.0 / (n - 3.0) : 1.0 / (n + 3.0);
  return {es, var};
}

EffectSizeResult log_odds_ratio(double n11, double n10, double n01,
                                double n00) {
  for (double c : {n11, n10, n01, n00})
    if (!(c > 0.0))
      throw DomainError(
          "log_odds_ratio: zero cell count (no continuity correction is "
          "applied)");
  const double es = std::log((n11 / n10) / (n01 / n00));
  const double var = 1.0 / n11 + 1.0 / n10 + 1.0 / n01 + 1.0 / n00;
  return {es, var};
}

EffectSizeResult falconer_heritability(double rho_mz, int n_mz, double rho_dz,
                                       int n_dz) {
  if (std::abs(rho_mz) > 1.0 || std::abs(rho_dz) > 1.0)
    throw DomainError("falconer_heritability: correlations must lie in [-1,1]");
  if (n_mz < 1 || n_dz < 1)
    throw DomainError("falconer_heritability: pair counts must be >= 1");
  const double es = 2.0 * (rho_mz - rho_dz);
  const double a = 1.0 - rho_mz * rho_mz;
  const double b = 1.0 - rho_dz * rho_dz;
  const double var = 4.0 * (a * a / n_mz + b * b / n_dz);
  return {es, var};
}

}  // namespace bmeta
