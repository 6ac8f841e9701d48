// Command-line front end: fit Bayesian meta-analytic models, evaluate
// posterior predictive densities, compare fitted runs by predictive error,
// convert summary statistics to effect sizes, and run data diagnostics.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bmeta/bnp_model.hpp"
#include "bmeta/dataset.hpp"
#include "bmeta/diagnostics.hpp"
#include "bmeta/effect_sizes.hpp"
#include "bmeta/errors.hpp"
#include "bmeta/eval.hpp"
#include "bmeta/normal_model.hpp"
#include "bmeta/synthetic.hpp"
#include "bmeta/util.hpp"
#include "run_io.hpp"

namespace fs = std::filesystem;
using namespace bmeta;
using namespace bmeta::tools;

namespace {

struct CommonOpts {
  std::string data_path;
  std::string out_dir = "out";
  std::uint64_t seed = 42;
  char delim = ',';
  std::vector<std::string> exclude;
};

CsvSchema make_schema(const CommonOpts& c) {
  CsvSchema s;
  s.delimiter = c.delim;
  s.exclude = c.exclude;
  return s;
}

struct FitOpts {
  CommonOpts common;
  std::string spec_path;
  std::string model;  // overrides the configuration file when set
  int burn = -1, keep = -1, thin = -1;
  int window = -1;
  bool allow_unstable = false;
  bool no_standardize = false;
  std::string label;
};

PriorConfig priors_from_config(const KvConfig& cfg) {
  PriorConfig pr;
  pr.v_intercept = cfg.get_num("v_intercept", pr.v_intercept);
  pr.v_spike = cfg.get_num("v_spike", pr.v_spike);
  pr.v_slab = cfg.get_num("v_slab", pr.v_slab);
  pr.bernoulli_p = cfg.get_num("bernoulli_p", pr.bernoulli_p);
  pr.b0 = cfg.get_num("b0", pr.b0);
  pr.b00 = cfg.get_num("b00", pr.b00);
  pr.a_phi = cfg.get_num("a_phi", pr.a_phi);
  pr.v_weight = cfg.get_num("v_weight", pr.v_weight);
  pr.inv_gamma_eps = cfg.get_num("inv_gamma_eps", pr.inv_gamma_eps);
  pr.half_t_a = cfg.get_num("half_t_a", pr.half_t_a);
  pr.half_t_b = cfg.get_num("half_t_b", pr.half_t_b);
  const std::string vp = cfg.get("variance_prior", "uniform");
  if (vp == "uniform")
    pr.variance_prior = VariancePrior::uniform;
  else if (vp == "inv_gamma")
    pr.variance_prior = VariancePrior::inv_gamma;
  else if (vp == "half_t")
    pr.variance_prior = VariancePrior::half_t;
  else
    throw ParseError("unknown variance_prior '" + vp + "'");
  return pr;
}

CovariateMode mode_from_name(const std::string& name) {
  if (name == "none") return CovariateMode::none;
  if (name == "all") return CovariateMode::all;
  if (name == "spike-slab" || name == "spike_slab" || name == "ss")
    return CovariateMode::spike_slab;
  throw ParseError("unknown covariate mode '" + name + "'");
}

std::string canonical_config(const KvConfig& cfg) {
  std::ostringstream os;
  for (const auto& [k, v] : cfg.values) os << k << "=" << v << "\n";
  return os.str();
}

// effective model settings after spec file + command line merging
struct EffectiveConfig {
  std::string model = "FE";
  CovariateMode cov_mode = CovariateMode::none;
  Grouping grouping = Grouping::by_report;
  PriorConfig priors;
  int window_sample = 6, window_predict = 8;
  bool standardize = true;
  std::string config_hash;
};

EffectiveConfig resolve_config(const FitOpts& opt) {
  KvConfig cfg;
  if (!opt.spec_path.empty()) cfg = KvConfig::load_file(opt.spec_path);
  if (!opt.model.empty()) cfg.values["model"] = opt.model;
  if (opt.window > 0) cfg.values["window_sample"] = std::to_string(opt.window);
  if (opt.no_standardize) cfg.values["standardize"] = "false";

  EffectiveConfig ec;
  ec.model = cfg.get("model", "FE");
  if (ec.model != "FE" && ec.model != "2L" && ec.model != "D2L" &&
      ec.model != "3L" && ec.model != "BNP")
    throw ParseError("unknown model '" + ec.model +
                     "' (expected FE, 2L, D2L, 3L, or BNP)");
  ec.cov_mode = mode_from_name(
      cfg.get("covariates", ec.model == "BNP" ? "spike-slab" : "none"));
  ec.grouping = cfg.get("grouping", "by-report") == "by-study"
                    ? Grouping::by_study
                    : Grouping::by_report;
  ec.priors = priors_from_config(cfg);
  ec.window_sample =
      static_cast<int>(cfg.get_num("window_sample", ec.window_sample));
  ec.window_predict =
      static_cast<int>(cfg.get_num("window_predict", ec.window_predict));
  ec.standardize = cfg.get_bool("standardize", true);

  KvConfig canon = cfg;
  canon.values["model"] = ec.model;
  const std::string text = canonical_config(canon);
  ec.config_hash = to_hex(fnv1a64({text.data(), text.size()}));
  return ec;
}

MetaBlock base_meta(const std::string& command, const EffectiveConfig& ec,
                    const DrawsMeta& meta, const MetaDataset& d,
                    const std::string& cov_mode_name, bool standardized) {
  std::string covs;
  for (std::size_t k = 0; k < d.covariate_names.size(); ++k)
    covs += (k ? "," : "") + d.covariate_names[k];
  MetaBlock b;
  b.emplace_back("tool_version", kVersion);
  b.emplace_back("command", command);
  b.emplace_back("model", meta.model_label);
  b.emplace_back("model_kind", ec.model);
  b.emplace_back("grouping", grouping_name(ec.grouping));
  b.emplace_back("covariate_mode", cov_mode_name);
  b.emplace_back("config_hash", meta.config_hash);
  b.emplace_back("seed", std::to_string(meta.seed));
  b.emplace_back("dataset_hash", meta.dataset_hash);
  b.emplace_back("burn", std::to_string(meta.burn));
  b.emplace_back("keep", std::to_string(meta.keep));
  b.emplace_back("thin", std::to_string(meta.thin));
  b.emplace_back("n", std::to_string(meta.n));
  b.emplace_back("p", std::to_string(meta.p));
  b.emplace_back("window_sample", std::to_string(meta.window_sample));
  b.emplace_back("window_predict", std::to_string(meta.window_predict));
  b.emplace_back("k_convention", meta.k_convention);
  b.emplace_back("standardized", standardized ? "true" : "false");
  b.emplace_back("covariates", covs);
  return b;
}

int cmd_fit(const FitOpts& opt) {
  const auto ec = resolve_config(opt);
  MetaDataset d = load_dataset_file(opt.common.data_path,
                                    make_schema(opt.common));
  const std::string dataset_hash = hash_file(opt.common.data_path);

  RunInfo info;
  info.model = ec.model;
  info.standardized = false;
  if (d.p() > 0 && ec.standardize && ec.cov_mode != CovariateMode::none) {
    auto [std_d, std_info] = standardize_covariates(d);
    d = std::move(std_d);
    info.standardization = std::move(std_info);
    info.standardized = true;
  }
  info.covariate_names = d.covariate_names;

  McmcConfig mc;
  mc.seed = opt.common.seed;
  mc.burn = opt.burn >= 0 ? opt.burn : 20000;
  mc.keep = opt.keep >= 1 ? opt.keep : 200000;
  mc.thin = opt.thin >= 1 ? opt.thin : 1;

  std::unique_ptr<FittedModel> fm;
  std::string cov_mode_name;
  if (ec.model == "BNP") {
    BnpConfig cfg;
    cfg.priors = ec.priors;
    cfg.covariate_mode = ec.cov_mode;
    cfg.window_sample = ec.window_sample;
    cfg.window_predict = ec.window_predict;
    info.bnp_config = cfg;
    info.is_bnp = true;
    cov_mode_name = covariate_mode_name(d.p() > 0 ? ec.cov_mode
                                                  : CovariateMode::none);
    fm = std::make_unique<BnpDraws>(fit_bnp(d, cfg, mc));
  } else {
    NormalModelSpec spec;
    spec.kind = ec.model == "2L"    ? ModelKind::RE2L
                : ec.model == "D2L" ? ModelKind::RE2LDep
                : ec.model == "3L"  ? ModelKind::RE3L
                                    : ModelKind::FE;
    spec.grouping = ec.grouping;
    spec.covariate_mode = ec.cov_mode;
    spec.priors = ec.priors;
    info.normal_spec = spec;
    cov_mode_name = covariate_mode_name(ec.cov_mode);
    fm = std::make_unique<NormalDraws>(fit_normal(spec, d, mc));
  }

  // stamp hashes into the model metadata before writing artifacts
  DrawsMeta meta = fm->meta();
  meta.dataset_hash = dataset_hash;
  meta.config_hash = ec.config_hash;
  if (!opt.label.empty()) meta.model_label = opt.label;
  if (info.is_bnp) {
    auto* bnp = dynamic_cast<BnpDraws*>(fm.get());
    fm = std::make_unique<BnpDraws>(info.bnp_config, bnp->param_names(),
                                    bnp->samples(), bnp->components(), meta);
  } else {
    auto* nd = dynamic_cast<NormalDraws*>(fm.get());
    fm = std::make_unique<NormalDraws>(info.normal_spec, nd->param_names(),
                                       nd->samples(), meta);
  }
  info.meta = meta;

  const auto summary = summarize(*fm);
  save_fit(opt.common.out_dir, *fm, info,
           base_meta("fit", ec, meta, d, cov_mode_name, info.standardized),
           summary);

  bool all_stable = true;
  for (const auto& s : summary) all_stable = all_stable && s.stabilized;
  std::printf("fit %s: n=%d p=%d keep=%d seed=%llu -> %s\n",
              meta.model_label.c_str(), meta.n, meta.p, meta.keep,
              static_cast<unsigned long long>(meta.seed),
              opt.common.out_dir.c_str());
  for (const auto& s : summary)
    std::printf("  %-14s mean=%-10.4g sd=%-10.4g hw95=%-8.3g %s\n",
                s.name.c_str(), s.mean, s.sd, s.halfwidth95,
                s.stabilized ? "stable" : "UNSTABLE");
  if (!all_stable && !opt.allow_unstable) {
    std::fprintf(stderr,
                 "error: Monte Carlo half-widths above threshold; rerun "
                 "longer or pass --allow-unstable\n");
    return 2;
  }
  return 0;
}

struct PredictOpts {
  CommonOpts common;
  std::string run_dir;
  double sigma_sq = 1e-4;
  std::vector<std::string> at;  // name=value pairs, raw covariate scale
  std::string sweep;
  int sweep_points = 25;
  int grid_points = 512;
  bool svg = false;
};

Eigen::VectorXd covariate_point(const LoadedFit& fit,
                                const std::vector<std::string>& at) {
  const int p = fit.info.meta.p;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(p);
  for (const auto& kv : at) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw ParseError("--at expects name=value, got '" + kv + "'");
    const std::string name = kv.substr(0, eq);
    double value;
    if (!parse_double(kv.substr(eq + 1), value))
      throw ParseError("--at expects a numeric value in '" + kv + "'");
    int idx = -1;
    for (std::size_t k = 0; k < fit.info.covariate_names.size(); ++k)
      if (fit.info.covariate_names[k] == name) idx = static_cast<int>(k);
    if (idx < 0) throw SchemaError("unknown covariate name '" + name + "'");
    if (fit.info.standardized)
      x(idx) = (value - fit.info.standardization.mean(idx)) /
               fit.info.standardization.sd(idx);
    else
      x(idx) = value;
  }
  return x;
}

MetaBlock predict_meta(const LoadedFit& fit, const std::string& command) {
  MetaBlock b;
  b.emplace_back("tool_version", kVersion);
  b.emplace_back("command", command);
  b.emplace_back("model", fit.info.meta.model_label);
  b.emplace_back("config_hash", fit.info.meta.config_hash);
  b.emplace_back("seed", std::to_string(fit.info.meta.seed));
  b.emplace_back("dataset_hash", fit.info.meta.dataset_hash);
  return b;
}

int cmd_predict(const PredictOpts& opt) {
  LoadedFit fit = load_fit(opt.run_dir);
  const MetaDataset d =
      load_dataset_file(opt.common.data_path, make_schema(opt.common));
  const std::string dataset_hash = hash_file(opt.common.data_path);
  if (!fit.info.meta.dataset_hash.empty() &&
      fit.info.meta.dataset_hash != dataset_hash)
    throw MismatchError("dataset does not match the fitted run");

  const Eigen::VectorXd x = covariate_point(fit, opt.at);
  const auto grid =
      default_y_grid(*fit.model, d, x, opt.sigma_sq, opt.grid_points);
  const auto g =
      posterior_predictive_density(*fit.model, x, opt.sigma_sq, grid);
  const auto ms = moment_summary(g);
  const int modes = count_modes(g);

  const fs::path out(opt.common.out_dir);
  auto meta = predict_meta(fit, "predict");
  meta.emplace_back("sigma_sq", format_g17(opt.sigma_sq));

  {
    std::ostringstream os;
    os << render_meta_block(meta) << "y\tdensity\n";
    for (std::size_t i = 0; i < g.y.size(); ++i)
      os << format_g17(g.y[i]) << "\t" << format_g17(g.f[i]) << "\n";
    atomic_write(out / "density.tsv", os.str());
  }
  {
    std::ostringstream os;
    os << render_meta_block(meta);
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "mean\t%.6g\nmedian\t%.6g\nvariance\t%.6g\nskewness\t%.6g\n"
                  "kurtosis\t%.6g\nmodes\t%d\nintegral\t%.6g\n",
                  ms.mean, ms.median, ms.variance, ms.skewness, ms.kurtosis,
                  modes, grid_integral(g));
    os << buf;
    atomic_write(out / "moments.txt", os.str());
  }
  if (opt.svg)
    atomic_write(out / "density.svg",
                 svg_polyline(g.y, g.f, "posterior predictive density"));

  if (!opt.sweep.empty()) {
    int col = -1;
    for (std::size_t k = 0; k < fit.info.covariate_names.size(); ++k)
      if (fit.info.covariate_names[k] == opt.sweep) col = static_cast<int>(k);
    if (col < 0)
      throw SchemaError("unknown covariate name '" + opt.sweep + "'");
    // observed raw range comes from the dataset column of the same name
    int dcol = -1;
    for (std::size_t k = 0; k < d.covariate_names.size(); ++k)
      if (d.covariate_names[k] == opt.sweep) dcol = static_cast<int>(k);
    if (dcol < 0)
      throw SchemaError("covariate '" + opt.sweep + "' missing from data");
    const double lo = d.covariates.col(dcol).minCoeff();
    const double hi = d.covariates.col(dcol).maxCoeff();
    std::ostringstream os;
    os << render_meta_block(meta) << opt.sweep << "\tq25\tq50\tq75\n";
    for (double raw : linspace(lo, hi, opt.sweep_points)) {
      Eigen::VectorXd xs = x;
      xs(col) = fit.info.standardized
                    ? (raw - fit.info.standardization.mean(col)) /
                          fit.info.standardization.sd(col)
                    : raw;
      const auto gg = posterior_predictive_density(*fit.model, xs,
                                                   opt.sigma_sq, grid);
      os << format_g17(raw) << "\t" << format_g17(grid_quantile(gg, 0.25))
         << "\t" << format_g17(grid_quantile(gg, 0.50)) << "\t"
         << format_g17(grid_quantile(gg, 0.75)) << "\n";
    }
    atomic_write(out / ("sweep_" + opt.sweep + ".tsv"), os.str());
  }

  std::printf("predict %s: mean=%.4g median=%.4g var=%.4g skew=%.3g "
              "kurt=%.3g modes=%d -> %s\n",
              fit.info.meta.model_label.c_str(), ms.mean, ms.median,
              ms.variance, ms.skewness, ms.kurtosis, modes,
              opt.common.out_dir.c_str());
  return 0;
}

struct CompareOpts {
  CommonOpts common;
  std::vector<std::string> runs;
};

int cmd_compare(const CompareOpts& opt) {
  const MetaDataset d =
      load_dataset_file(opt.common.data_path, make_schema(opt.common));
  const std::string dataset_hash = hash_file(opt.common.data_path);

  std::vector<DReport> reports;
  std::vector<LoadedFit> fits;
  for (const auto& run : opt.runs) fits.push_back(load_fit(run));
  for (auto& fit : fits) {
    if (!fit.info.meta.dataset_hash.empty() &&
        fit.info.meta.dataset_hash != dataset_hash)
      throw MismatchError("run '" + fit.info.meta.model_label +
                          "' was fit on a different dataset");
    reports.push_back(d_criterion(*fit.model, d));
  }
  const auto cmp = compare(std::move(reports));

  std::ostringstream os;
  MetaBlock meta;
  meta.emplace_back("tool_version", kVersion);
  meta.emplace_back("command", "compare");
  {
    // the comparison's own fingerprint: the run config hashes in rank order
    std::string combined;
    std::string seeds;
    for (const auto& e : cmp.ranked) {
      combined += e.report.config_hash + ";";
      seeds += (seeds.empty() ? "" : ",") + std::to_string(e.report.seed);
    }
    meta.emplace_back("config_hash",
                      to_hex(fnv1a64({combined.data(), combined.size()})));
    meta.emplace_back("seed", seeds);
  }
  meta.emplace_back("dataset_hash", dataset_hash);
  os << render_meta_block(meta);
  os << "rank\tmodel\tD\tsqrtD\tseed\tconfig_hash\tsqrtDi_min\tsqrtDi_q1\t"
        "sqrtDi_med\tsqrtDi_q3\tsqrtDi_max\toutliers\n";
  int rank = 1;
  for (const auto& e : cmp.ranked) {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "%d\t%s\t%.6g\t%.6g\t%llu\t%s\t%.3g\t%.3g\t%.3g\t%.3g\t%.3g"
                  "\t%d\n",
                  rank++, e.report.label.c_str(), e.report.d, e.report.sqrt_d,
                  static_cast<unsigned long long>(e.report.seed),
                  e.report.config_hash.c_str(), e.sqrt_di_summary.min,
                  e.sqrt_di_summary.q1, e.sqrt_di_summary.med,
                  e.sqrt_di_summary.q3, e.sqrt_di_summary.max,
                  e.outlier_count);
    os << buf;
  }
  atomic_write(fs::path(opt.common.out_dir) / "comparison.txt", os.str());

  std::printf("%-24s %10s %10s\n", "model", "D", "sqrt(D)");
  for (const auto& e : cmp.ranked)
    std::printf("%-24s %10.4g %10.4g\n", e.report.label.c_str(), e.report.d,
                e.report.sqrt_d);
  return 0;
}

struct DiagnoseOpts {
  CommonOpts common;
  bool svg = false;
  int grid_points = 512;
};

int cmd_diagnose(const DiagnoseOpts& opt) {
  const MetaDataset d =
      load_dataset_file(opt.common.data_path, make_schema(opt.common));
  std::vector<double> ys(d.y.data(), d.y.data() + d.n());
  const auto ad = anderson_darling(ys);
  const auto g = gaussian_kde(ys, {}, opt.grid_points);
  const auto ms = moment_summary(std::span<const double>(ys.data(), ys.size()));

  MetaBlock meta;
  meta.emplace_back("tool_version", kVersion);
  meta.emplace_back("command", "diagnose");
  {
    const std::string t = "diagnose grid_points=" +
                          std::to_string(opt.grid_points);
    meta.emplace_back("config_hash", to_hex(fnv1a64({t.data(), t.size()})));
  }
  meta.emplace_back("seed", std::to_string(opt.common.seed));
  meta.emplace_back("dataset_hash", hash_file(opt.common.data_path));

  const fs::path out(opt.common.out_dir);
  {
    std::ostringstream os;
    os << render_meta_block(meta);
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "anderson_darling_a2\t%.6g\nanderson_darling_a2_star\t%.6g\n"
                  "reject_normality_at_05\t%s\n"
                  "n\t%d\nmean\t%.6g\nmedian\t%.6g\nvariance\t%.6g\n"
                  "skewness\t%.6g\nkurtosis\t%.6g\n"
                  "kde_bandwidth\t%.6g\nkde_modes\t%d\n",
                  ad.a2, ad.a2_star, ad.reject_at_05 ? "yes" : "no", d.n(),
                  ms.mean, ms.median, ms.variance, ms.skewness, ms.kurtosis,
                  g.bandwidth, count_modes(g));
    os << buf;
    atomic_write(out / "diagnose.txt", os.str());
  }
  {
    std::ostringstream os;
    os << render_meta_block(meta) << "y\tdensity\n";
    for (std::size_t i = 0; i < g.y.size(); ++i)
      os << format_g17(g.y[i]) << "\t" << format_g17(g.f[i]) << "\n";
    atomic_write(out / "density.tsv", os.str());
  }
  if (opt.svg)
    atomic_write(out / "density.svg",
                 svg_polyline(g.y, g.f, "kernel density estimate"));

  std::printf("diagnose: n=%d A2*=%.4g reject=%s modes=%d -> %s\n", d.n(),
              ad.a2_star, ad.reject_at_05 ? "yes" : "no", count_modes(g),
              opt.common.out_dir.c_str());
  return 0;
}

struct EsOpts {
  CommonOpts common;
  std::string type;
  std::string out_file = "effect_sizes.csv";
  bool literature_variant = false;
};

int cmd_es(const EsOpts& opt) {
  const auto table = Table::load_file(opt.common.data_path, opt.common.delim);
  std::vector<std::string> inputs;
  if (opt.type == "hedges")
    inputs = {"mean1", "mean2", "var1", "var2", "n1", "n2"};
  else if (opt.type == "fisher")
    inputs = {"rho", "n"};
  else if (opt.type == "logodds")
    inputs = {"n11", "n10", "n01", "n00"};
  else if (opt.type == "falconer")
    inputs = {"rho_mz", "n_mz", "rho_dz", "n_dz"};
  else
    throw ParseError("unknown effect-size type '" + opt.type +
                     "' (hedges, fisher, logodds, falconer)");

  std::vector<int> cols;
  for (const auto& name : inputs) {
    const int c = table.column(name);
    if (c < 0) throw SchemaError("required column '" + name + "' not found");
    cols.push_back(c);
  }
  std::vector<int> passthrough;
  for (int c = 0; c < static_cast<int>(table.header.size()); ++c)
    if (std::find(cols.begin(), cols.end(), c) == cols.end())
      passthrough.push_back(c);

  std::ostringstream os;
  MetaBlock meta;
  meta.emplace_back("tool_version", kVersion);
  meta.emplace_back("command", "es");
  meta.emplace_back("type", opt.type);
  meta.emplace_back("literature_variant",
                    opt.literature_variant ? "true" : "false");
  meta.emplace_back("dataset_hash", hash_file(opt.common.data_path));
  meta.emplace_back("seed", std::to_string(opt.common.seed));
  {
    const std::string t = "es type=" + opt.type +
                          (opt.literature_variant ? " variant" : "");
    meta.emplace_back("config_hash", to_hex(fnv1a64({t.data(), t.size()})));
  }
  os << render_meta_block(meta);
  os << "y,var";
  for (int c : passthrough)
    os << "," << table.header[static_cast<std::size_t>(c)];
  os << "\n";

  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    auto num = [&](int k) {
      const auto& cell =
          row[static_cast<std::size_t>(cols[static_cast<std::size_t>(k)])];
      double v;
      if (!parse_double(cell, v))
        throw ParseError("row " + std::to_string(r + 1) +
                         ": non-numeric value in column '" +
                         inputs[static_cast<std::size_t>(k)] + "'");
      return v;
    };
    EffectSizeResult es{};
    try {
      if (opt.type == "hedges")
        es = hedges_g(num(0), num(1), num(2), num(3), static_cast<int>(num(4)),
                      static_cast<int>(num(5)), opt.literature_variant);
      else if (opt.type == "fisher")
        es = fisher_z(num(0), static_cast<int>(num(1)),
                      opt.literature_variant);
      else if (opt.type == "logodds")
        es = log_odds_ratio(num(0), num(1), num(2), num(3));
      else
        es = falconer_heritability(num(0), static_cast<int>(num(1)), num(2),
                                   static_cast<int>(num(3)));
    } catch (const ParseError&) {
      throw;
    } catch (const std::runtime_error& e) {
      throw DomainError("row " + std::to_string(r + 1) + ": " + e.what());
    }
    os << format_g17(es.es) << "," << format_g17(es.var);
    for (int c : passthrough) os << "," << row[static_cast<std::size_t>(c)];
    os << "\n";
  }
  atomic_write(fs::path(opt.common.out_dir) / opt.out_file, os.str());
  std::printf("es %s: %zu rows -> %s/%s\n", opt.type.c_str(),
              table.rows.size(), opt.common.out_dir.c_str(),
              opt.out_file.c_str());
  return 0;
}

struct SimulateOpts {
  CommonOpts common;
  std::string kind = "fe";
  int n = 100, p = 0, groups = 0;
  double beta0 = 0.5, sigma0_sq = 0, sigma00_sq = 0, psi = 0;
  std::string slopes;
  double var_lo = 0.01, var_hi = 0.25;
  double mode_lo = -2, mode_hi = 2, mode_within_var = 0.1;
  bool no_covariate_link = false;
  std::string out_file = "synthetic.csv";
};

int cmd_simulate(const SimulateOpts& opt) {
  SyntheticSpec spec;
  spec.kind = gen_kind_from_name(opt.kind);
  spec.n = opt.n;
  spec.p = opt.p;
  spec.beta0 = opt.beta0;
  spec.sigma0_sq = opt.sigma0_sq;
  spec.sigma00_sq = opt.sigma00_sq;
  spec.psi = opt.psi;
  spec.groups = opt.groups;
  spec.var_lo = opt.var_lo;
  spec.var_hi = opt.var_hi;
  spec.mode_lo = opt.mode_lo;
  spec.mode_hi = opt.mode_hi;
  spec.mode_within_var = opt.mode_within_var;
  spec.covariate_linked = !opt.no_covariate_link;
  if (!opt.slopes.empty()) {
    std::vector<double> s;
    std::stringstream ss(opt.slopes);
    std::string cell;
    while (std::getline(ss, cell, ',')) s.push_back(std::stod(cell));
    spec.slopes =
        Eigen::Map<Eigen::VectorXd>(s.data(), static_cast<int>(s.size()));
  }
  const auto [d, truth] = generate_synthetic(spec, opt.common.seed);

  std::ostringstream os;
  MetaBlock meta;
  meta.emplace_back("tool_version", kVersion);
  meta.emplace_back("command", "simulate");
  meta.emplace_back("kind", opt.kind);
  meta.emplace_back("seed", std::to_string(opt.common.seed));
  {
    std::ostringstream cfg;
    cfg << "kind=" << opt.kind << " n=" << opt.n << " p=" << opt.p
        << " beta0=" << opt.beta0 << " sigma0_sq=" << opt.sigma0_sq
        << " sigma00_sq=" << opt.sigma00_sq << " psi=" << opt.psi
        << " groups=" << opt.groups;
    const std::string t = cfg.str();
    meta.emplace_back("config_hash", to_hex(fnv1a64({t.data(), t.size()})));
    meta.emplace_back("truth", t);
  }
  os << render_meta_block(meta);
  os << "y,var,study";
  for (const auto& name : d.covariate_names) os << "," << name;
  os << "\n";
  for (int i = 0; i < d.n(); ++i) {
    os << format_g17(d.y(i)) << "," << format_g17(d.var(i)) << ","
       << d.study[static_cast<std::size_t>(i)];
    for (int k = 0; k < d.p(); ++k)
      os << "," << format_g17(d.covariates(i, k));
    os << "\n";
  }
  atomic_write(fs::path(opt.common.out_dir) / opt.out_file, os.str());
  std::printf("simulate %s: n=%d p=%d seed=%llu -> %s/%s\n", opt.kind.c_str(),
              opt.n, opt.p, static_cast<unsigned long long>(opt.common.seed),
              opt.common.out_dir.c_str(), opt.out_file.c_str());
  return 0;
}

struct WeightsDemoOpts {
  CommonOpts common;
  double eta = 0.7;
  std::vector<double> sigmas = {0.05, 0.5, 1.0, 2.0};
  int window = 8;
  int grid_points = 512;
};

int cmd_weights_demo(const WeightsDemoOpts& opt) {
  Rng rng(opt.common.seed);
  // shared component draws across panels: intercepts and spreads from a
  // normal-gamma, wide enough to cover the largest window
  double max_sigma = 0;
  for (double s : opt.sigmas) max_sigma = std::max(max_sigma, s);
  const int j_lo =
      static_cast<int>(std::floor(opt.eta - opt.window * max_sigma)) - 1;
  const int j_hi =
      static_cast<int>(std::ceil(opt.eta + opt.window * max_sigma)) + 1;
  std::map<int, std::pair<double, double>> comps;  // j -> (mu, var)
  for (int j = j_lo; j <= j_hi; ++j) {
    const double tau = rng.gamma(2.0, 2.0);
    comps[j] = {rng.normal(0.0, 2.0), 1.0 / tau};
  }

  const fs::path out(opt.common.out_dir);
  int panel = 0;
  for (double sigma : opt.sigmas) {
    ++panel;
    const auto ww = mixture_weights(opt.eta, sigma, opt.window);
    MetaBlock meta;
    meta.emplace_back("tool_version", kVersion);
    meta.emplace_back("command", "weights-demo");
    meta.emplace_back("seed", std::to_string(opt.common.seed));
    meta.emplace_back("eta", format_g17(opt.eta));
    meta.emplace_back("sigma_omega", format_g17(sigma));
    {
      std::ostringstream cfg;
      cfg << "eta=" << opt.eta << " sigma=" << sigma
          << " window=" << opt.window;
      const std::string t = cfg.str();
      meta.emplace_back("config_hash", to_hex(fnv1a64({t.data(), t.size()})));
    }

    int above = 0;
    {
      std::ostringstream os;
      os << render_meta_block(meta) << "j\tomega\n";
      for (int j = ww.j_lo; j <= ww.j_hi(); ++j) {
        os << j << "\t" << format_g17(ww.weight_at(j)) << "\n";
        above += ww.weight_at(j) > 0.05;
      }
      atomic_write(out / ("weights_" + std::to_string(panel) + ".tsv"),
                   os.str());
    }
    {
      double lo = 1e300, hi = -1e300;
      for (int j = ww.j_lo; j <= ww.j_hi(); ++j) {
        const auto& [mu, var] = comps.at(j);
        lo = std::min(lo, mu - 4.0 * std::sqrt(var));
        hi = std::max(hi, mu + 4.0 * std::sqrt(var));
      }
      std::ostringstream os;
      os << render_meta_block(meta) << "y\tdensity\n";
      for (double y : linspace(lo, hi, opt.grid_points)) {
        double f = 0;
        for (int j = ww.j_lo; j <= ww.j_hi(); ++j) {
          const auto& [mu, var] = comps.at(j);
          f += ww.weight_at(j) * norm_pdf(y, mu, var);
        }
        os << format_g17(y) << "\t" << format_g17(f) << "\n";
      }
      atomic_write(out / ("density_" + std::to_string(panel) + ".tsv"),
                   os.str());
    }
    std::printf("weights-demo sigma=%-6g weights>.05: %d  total=%.12f\n",
                sigma, above, ww.sum());
  }
  return 0;
}

void add_common(CLI::App* cmd, CommonOpts& c, bool needs_data = true) {
  auto* data = cmd->add_option("--data", c.data_path, "dataset csv");
  if (needs_data) data->required();
  cmd->add_option("--out", c.out_dir, "output directory");
  cmd->add_option("--seed", c.seed, "random seed (recorded in artifacts)");
  cmd->add_option("--delim", c.delim, "field delimiter");
  cmd->add_option("--exclude", c.exclude, "columns to drop from covariates");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian meta-analysis: normal fixed/random-effects models "
               "and an infinite-mixture model with covariate-dependent "
               "weights"};
  app.require_subcommand(1);

  FitOpts fit_opts;
  auto* fit_cmd = app.add_subcommand("fit", "run the MCMC sampler");
  add_common(fit_cmd, fit_opts.common);
  fit_cmd->add_option("--spec", fit_opts.spec_path,
                      "model configuration file (key = value)");
  fit_cmd->add_option("--model", fit_opts.model,
                      "FE | 2L | D2L | 3L | BNP (overrides --spec)");
  fit_cmd->add_option("--burn", fit_opts.burn, "burn-in sweeps");
  fit_cmd->add_option("--keep", fit_opts.keep,
                      "retained draws (default 200000)");
  fit_cmd->add_option("--thin", fit_opts.thin, "thinning interval");
  fit_cmd->add_option("--window", fit_opts.window,
                      "mixture truncation window during sampling");
  fit_cmd->add_option("--label", fit_opts.label, "model label in reports");
  fit_cmd->add_flag("--allow-unstable", fit_opts.allow_unstable,
                    "exit 0 even when half-widths exceed the threshold");
  fit_cmd->add_flag("--no-standardize", fit_opts.no_standardize,
                    "skip covariate z-standardization");

  PredictOpts pred_opts;
  auto* pred_cmd =
      app.add_subcommand("predict", "posterior predictive density");
  add_common(pred_cmd, pred_opts.common);
  pred_cmd->add_option("--run", pred_opts.run_dir, "fitted run directory")
      ->required();
  pred_cmd->add_option("--sigma-sq", pred_opts.sigma_sq,
                       "sampling variance to condition on");
  pred_cmd->add_option("--at", pred_opts.at,
                       "covariate values name=value (raw scale)");
  pred_cmd->add_option("--sweep", pred_opts.sweep,
                       "sweep one covariate over its observed range");
  pred_cmd->add_option("--sweep-points", pred_opts.sweep_points,
                       "points along the sweep");
  pred_cmd->add_option("--grid-points", pred_opts.grid_points,
                       "density grid size");
  pred_cmd->add_flag("--svg", pred_opts.svg, "emit a line-plot svg");

  CompareOpts cmp_opts;
  auto* cmp_cmd =
      app.add_subcommand("compare", "rank fitted runs by predictive error");
  add_common(cmp_cmd, cmp_opts.common);
  cmp_cmd->add_option("--runs", cmp_opts.runs, "fitted run directories")
      ->required()
      ->expected(-1);

  DiagnoseOpts diag_opts;
  auto* diag_cmd =
      app.add_subcommand("diagnose", "normality test and density estimate");
  add_common(diag_cmd, diag_opts.common);
  diag_cmd->add_option("--grid-points", diag_opts.grid_points,
                       "density grid size");
  diag_cmd->add_flag("--svg", diag_opts.svg, "emit a line-plot svg");

  EsOpts es_opts;
  auto* es_cmd = app.add_subcommand("es", "summary statistics to effect sizes");
  add_common(es_cmd, es_opts.common);
  es_cmd->add_option("--type", es_opts.type,
                     "hedges | fisher | logodds | falconer")
      ->required();
  es_cmd->add_option("--out-file", es_opts.out_file, "output file name");
  es_cmd->add_flag("--literature-variant", es_opts.literature_variant,
                   "use 1/(n-3) and squared-correction variants");

  SimulateOpts sim_opts;
  auto* sim_cmd = app.add_subcommand("simulate", "synthetic dataset");
  add_common(sim_cmd, sim_opts.common, /*needs_data=*/false);
  sim_cmd->add_option("--kind", sim_opts.kind,
                      "fe | re2l | re3l | d2l | bimodal");
  sim_cmd->add_option("--n", sim_opts.n, "records");
  sim_cmd->add_option("--p", sim_opts.p, "covariates");
  sim_cmd->add_option("--groups", sim_opts.groups, "studies (0: one each)");
  sim_cmd->add_option("--beta0", sim_opts.beta0, "true mean effect");
  sim_cmd->add_option("--slopes", sim_opts.slopes, "true slopes, comma list");
  sim_cmd->add_option("--sigma0-sq", sim_opts.sigma0_sq,
                      "level-2 intercept variance");
  sim_cmd->add_option("--sigma00-sq", sim_opts.sigma00_sq,
                      "level-3 intercept variance");
  sim_cmd->add_option("--psi", sim_opts.psi, "within-study covariance");
  sim_cmd->add_option("--var-lo", sim_opts.var_lo, "sampling variance low");
  sim_cmd->add_option("--var-hi", sim_opts.var_hi, "sampling variance high");
  sim_cmd->add_option("--mode-lo", sim_opts.mode_lo, "bimodal low center");
  sim_cmd->add_option("--mode-hi", sim_opts.mode_hi, "bimodal high center");
  sim_cmd->add_option("--mode-within-var", sim_opts.mode_within_var,
                      "within-cluster intercept variance");
  sim_cmd->add_flag("--no-covariate-link", sim_opts.no_covariate_link,
                    "clusters independent of the first covariate");
  sim_cmd->add_option("--out-file", sim_opts.out_file, "output file name");

  WeightsDemoOpts wd_opts;
  auto* wd_cmd = app.add_subcommand(
      "weights-demo",
      "mixture weights and induced densities across dispersion values");
  add_common(wd_cmd, wd_opts.common, /*needs_data=*/false);
  wd_cmd->add_option("--eta", wd_opts.eta, "weight-regression value");
  wd_cmd->add_option("--sigmas", wd_opts.sigmas, "dispersion values");
  wd_cmd->add_option("--window", wd_opts.window, "truncation window");
  wd_cmd->add_option("--grid-points", wd_opts.grid_points, "grid size");

  CLI11_PARSE(app, argc, argv);

  try {
    if (fit_cmd->parsed()) return cmd_fit(fit_opts);
    if (pred_cmd->parsed()) return cmd_predict(pred_opts);
    if (cmp_cmd->parsed()) return cmd_compare(cmp_opts);
    if (diag_cmd->parsed()) return cmd_diagnose(diag_opts);
    if (es_cmd->parsed()) return cmd_es(es_opts);
    if (sim_cmd->parsed()) return cmd_simulate(sim_opts);
    if (wd_cmd->parsed()) return cmd_weights_demo(wd_opts);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
