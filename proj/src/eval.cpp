#include "bmeta/eval.hpp"

#include <algorithm>
#include <cmath>

#include "bmeta/errors.hpp"
#include "bmeta/util.hpp"

namespace bmeta {

namespace {
constexpr int kGridChunk = 64;
}

int FittedModel::param_index(const std::string& name) const {
  for (std::size_t k = 0; k < names_.size(); ++k)
    if (names_[k] == name) return static_cast<int>(k);
  throw SchemaError("unknown parameter '" + name + "'");
}

std::span<const double> FittedModel::trace(const std::string& name) const {
  const int k = param_index(name);
  return {samples_.col(k).data(), static_cast<std::size_t>(samples_.rows())};
}

DensityGrid posterior_predictive_density(const FittedModel& fm,
                                         const Eigen::VectorXd& xcov,
                                         double sigma_sq,
                                         std::span<const double> ygrid,
                                         Exec exec) {
  const int g = static_cast<int>(ygrid.size());
  if (g < 2) throw DomainError("predictive density: grid too small");
  for (int i = 1; i < g; ++i)
    if (!(ygrid[static_cast<std::size_t>(i)] >
          ygrid[static_cast<std::size_t>(i - 1)]))
      throw DomainError("predictive density: grid must be strictly increasing");
  const int s_total = fm.n_draws();
  if (s_total < 1) throw InsufficientDataError("predictive density: no draws");

  DensityGrid out;
  out.y.assign(ygrid.begin(), ygrid.end());
  out.f.assign(static_cast<std::size_t>(g), 0.0);
  out.source = fm.meta().model_label;

  const int chunks = (g + kGridChunk - 1) / kGridChunk;
  const bool par = exec == Exec::parallel;
#pragma omp parallel for schedule(dynamic) if (par)
  for (int c = 0; c < chunks; ++c) {
    const int lo = c * kGridChunk;
    const int hi = std::min(lo + kGridChunk, g);
    std::span<const double> ys{ygrid.data() + lo,
                               static_cast<std::size_t>(hi - lo)};
    std::span<double> fs{out.f.data() + lo, static_cast<std::size_t>(hi - lo)};
    for (int s = 0; s < s_total; ++s)
      fm.accumulate_draw_density(s, ys, xcov, sigma_sq, fs);
  }
  const double inv = 1.0 / static_cast<double>(s_total);
  for (double& f : out.f) f *= inv;
  return out;
}

std::vector<double> default_y_grid(const FittedModel& fm, const MetaDataset& d,
                                   const Eigen::VectorXd& xcov,
                                   double sigma_sq, int points) {
  double max_sd = 0;
  const int s_total = fm.n_draws();
  const int step = std::max(1, s_total / 2048);  // scan a draw subsample
  for (int s = 0; s < s_total; s += step) {
    const auto pm = fm.draw_moments(s, xcov, sigma_sq);
    max_sd = std::max(max_sd, std::sqrt(std::max(0.0, pm.var)));
  }
  const double lo = d.y.minCoeff() - 4.0 * max_sd;
  const double hi = d.y.maxCoeff() + 4.0 * max_sd;
  return linspace(lo, hi, points);
}

MomentTable predictive_moment_table(const FittedModel& fm,
                                    const MetaDataset& d, Exec exec) {
  const int n = d.n();
  const int s_total = fm.n_draws();
  if (s_total < 1) throw InsufficientDataError("moment table: no draws");
  MomentTable t;
  t.e.resize(n);
  t.v.resize(n);
  const bool par = exec == Exec::parallel;
#pragma omp parallel for schedule(dynamic) if (par)
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd x = d.covariates.row(i).transpose();
    double sm = 0, sm2 = 0, sv = 0;
    for (int s = 0; s < s_total; ++s) {
      const auto pm = fm.draw_moments(s, x, d.var(i));
      sm += pm.mean;
      sm2 += pm.mean * pm.mean;
      sv += pm.var;
    }
    const double inv = 1.0 / static_cast<double>(s_total);
    const double e = sm * inv;
    t.e(i) = e;
    t.v(i) = sv * inv + std::max(0.0, sm2 * inv - e * e);
  }
  return t;
}

DReport d_criterion(const FittedModel& fm, const MetaDataset& d, Exec exec) {
  if (fm.meta().n != 0 && fm.meta().n != d.n())
    throw MismatchError("d_criterion: model was fit on a different n");
  const MomentTable t = predictive_moment_table(fm, d, exec);
  DReport r;
  r.label = fm.meta().model_label;
  r.dataset_hash = fm.meta().dataset_hash;
  r.config_hash = fm.meta().config_hash;
  r.seed = fm.meta().seed;
  r.n = d.n();
  r.d_i.resize(d.n());
  r.sqrt_d_i.resize(d.n());
  for (int i = 0; i < d.n(); ++i) {
    const double resid = d.y(i) - t.e(i);
    r.d_i(i) = resid * resid + t.v(i);
    r.sqrt_d_i(i) = std::sqrt(r.d_i(i));
  }
  r.d = r.d_i.sum();
  r.sqrt_d = std::sqrt(r.d);
  return r;
}

McseResult mc_diagnostics(std::span<const double> trace, double threshold) {
  const int n = static_cast<int>(trace.size());
  if (n < 100)
    throw InsufficientDataError("mc_diagnostics: trace shorter than 100");
  const int b = static_cast<int>(std::floor(std::sqrt(static_cast<double>(n))));
  const int len = n / b;
  std::vector<double> bm(static_cast<std::size_t>(b));
  for (int k = 0; k < b; ++k) {
    double s = 0;
    for (int t = k * len; t < (k + 1) * len; ++t)
      s += trace[static_cast<std::size_t>(t)];
    bm[static_cast<std::size_t>(k)] = s / len;
  }
  const double sb = sample_sd(bm);
  McseResult r;
  r.mcse = sb / std::sqrt(static_cast<double>(b));
  r.halfwidth95 = 1.96 * r.mcse;
  r.stabilized = r.halfwidth95 <= threshold;
  return r;
}

FiveNum five_number(std::span<const double> values) {
  FiveNum f;
  f.min = *std::min_element(values.begin(), values.end());
  f.max = *std::max_element(values.begin(), values.end());
  f.q1 = quantile_type7(values, 0.25);
  f.med = quantile_type7(values, 0.50);
  f.q3 = quantile_type7(values, 0.75);
  return f;
}

ComparisonReport compare(std::vector<DReport> reports) {
  if (reports.empty()) throw InsufficientDataError("compare: no reports");
  for (const auto& r : reports) {
    if (r.n != reports.front().n)
      throw MismatchError("compare: reports cover different datasets");
    if (!r.dataset_hash.empty() && !reports.front().dataset_hash.empty() &&
        r.dataset_hash != reports.front().dataset_hash)
      throw MismatchError("compare: dataset hashes differ");
  }
  std::stable_sort(reports.begin(), reports.end(),
                   [](const DReport& a, const DReport& b) { return a.d < b.d; });
  ComparisonReport out;
  for (auto& r : reports) {
    ComparisonEntry e;
    std::span<const double> sdi{r.sqrt_d_i.data(),
                                static_cast<std::size_t>(r.sqrt_d_i.size())};
    e.sqrt_di_summary = five_number(sdi);
    const double iqr = e.sqrt_di_summary.q3 - e.sqrt_di_summary.q1;
    const double cut = e.sqrt_di_summary.q3 + 1.5 * iqr;
    e.outlier_count =
        static_cast<int>(std::count_if(sdi.begin(), sdi.end(),
                                       [cut](double v) { return v > cut; }));
    e.report = std::move(r);
    out.ranked.push_back(std::move(e));
  }
  return out;
}

std::vector<ParamSummary> summarize(const FittedModel& fm,
                                    double halfwidth_threshold) {
  std::vector<ParamSummary> out;
  for (const auto& name : fm.param_names()) {
    const auto tr = fm.trace(name);
    ParamSummary s;
    s.name = name;
    s.mean = mean_of(tr);
    s.sd = sample_sd(tr);
    s.q025 = quantile_type7(tr, 0.025);
    s.q50 = quantile_type7(tr, 0.50);
    s.q975 = quantile_type7(tr, 0.975);
    if (tr.size() >= 100) {
      const auto m = mc_diagnostics(tr, halfwidth_threshold);
      s.mcse = m.mcse;
      s.halfwidth95 = m.halfwidth95;
      s.stabilized = m.stabilized;
    } else {
      s.mcse = s.halfwidth95 = 0;
      s.stabilized = false;
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace bmeta
