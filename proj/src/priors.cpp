#include "bmeta/priors.hpp"

#include "bmeta/errors.hpp"

namespace bmeta {

void PriorConfig::validate() const {
  auto positive = [](double v) { return v > 0.0; };
  if (!positive(v_intercept) || !positive(v_spike) || !positive(v_slab) ||
      !positive(b0) || !positive(b00) || !positive(a_phi) ||
      !positive(v_weight) || !positive(inv_gamma_eps) ||
      !positive(half_t_a) || !positive(half_t_b))
    throw DomainError("prior config: all scales must be positive");
  if (!(bernoulli_p > 0.0 && bernoulli_p < 1.0))
    throw DomainError("prior config: inclusion probability must be in (0,1)");
  if (v_slab / v_spike > 10000.0 + 1e-9)
    throw DomainError("prior config: v_slab/v_spike must not exceed 10000");
}

}  // namespace bmeta
