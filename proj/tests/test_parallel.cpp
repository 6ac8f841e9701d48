#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "bmeta/bnp_model.hpp"
#include "bmeta/eval.hpp"
#include "bmeta/normal_model.hpp"
#include "bmeta/synthetic.hpp"
#include "bmeta/util.hpp"
#include "doctest.h"
#include "support/mock_model.hpp"

using namespace bmeta;

// The OpenMP kernels partition work over grid points and observations only,
// so their output must be bit-identical to the serial reference.

namespace {

struct Fixtures {
  MetaDataset data;
  NormalDraws normal;
  BnpDraws bnp;

  Fixtures() : data(make_data()), normal(fit_n(data)), bnp(fit_b(data)) {}

  static MetaDataset make_data() {
    SyntheticSpec gen;
    gen.kind = GenKind::bimodal;
    gen.n = 80;
    gen.p = 1;
    auto [raw, truth] = generate_synthetic(gen, 17);
    return standardize_covariates(raw).first;
  }
  static NormalDraws fit_n(const MetaDataset& d) {
    NormalModelSpec spec;
    spec.kind = ModelKind::RE2L;
    spec.covariate_mode = CovariateMode::all;
    McmcConfig mc;
    mc.burn = 300;
    mc.keep = 2000;
    mc.seed = 1;
    return fit_normal(spec, d, mc);
  }
  static BnpDraws fit_b(const MetaDataset& d) {
    BnpConfig cfg;
    McmcConfig mc;
    mc.burn = 500;
    mc.keep = 1500;
    mc.seed = 2;
    return fit_bnp(d, cfg, mc);
  }
};

}  // namespace

TEST_CASE("parallel kernels match the serial reference bit for bit") {
  Fixtures fx;
  const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(1);
  const auto grid = linspace(-4.0, 4.0, 511);

  for (const FittedModel* fm :
       std::initializer_list<const FittedModel*>{&fx.normal, &fx.bnp}) {
    const auto gs = posterior_predictive_density(*fm, x0, 1e-4, grid,
                                                 Exec::serial);
    const auto gp = posterior_predictive_density(*fm, x0, 1e-4, grid,
                                                 Exec::parallel);
    REQUIRE(gs.f.size() == gp.f.size());
    for (std::size_t i = 0; i < gs.f.size(); ++i) CHECK(gs.f[i] == gp.f[i]);

    const auto ts = predictive_moment_table(*fm, fx.data, Exec::serial);
    const auto tp = predictive_moment_table(*fm, fx.data, Exec::parallel);
    for (int i = 0; i < fx.data.n(); ++i) {
      CHECK(ts.e(i) == tp.e(i));
      CHECK(ts.v(i) == tp.v(i));
    }

    const auto ds = d_criterion(*fm, fx.data, Exec::serial);
    const auto dp = d_criterion(*fm, fx.data, Exec::parallel);
    CHECK(ds.d == dp.d);
  }
}

#ifdef _OPENMP
TEST_CASE("results are invariant to the number of threads") {
  Fixtures fx;
  const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(1);
  const auto grid = linspace(-4.0, 4.0, 257);

  const int before = omp_get_max_threads();
  omp_set_num_threads(1);
  const auto g1 = posterior_predictive_density(fx.bnp, x0, 1e-4, grid,
                                               Exec::parallel);
  omp_set_num_threads(5);
  const auto g5 = posterior_predictive_density(fx.bnp, x0, 1e-4, grid,
                                               Exec::parallel);
  omp_set_num_threads(before);
  for (std::size_t i = 0; i < g1.f.size(); ++i) CHECK(g1.f[i] == g5.f[i]);
}
#endif

TEST_CASE("kde grid is identical across execution modes") {
  // gaussian_kde always runs its grid loop under the same partitioning;
  // repeated evaluation must reproduce itself exactly
  Fixtures fx;
  std::vector<double> ys(fx.data.y.data(), fx.data.y.data() + fx.data.n());
  const auto a = gaussian_kde(ys);
  const auto b = gaussian_kde(ys);
  CHECK(a.f == b.f);
}
