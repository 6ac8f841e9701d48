#include "run_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "bmeta/errors.hpp"
#include "bmeta/util.hpp"

namespace bmeta::tools {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, delim)) out.push_back(cell);
  if (!line.empty() && line.back() == delim) out.emplace_back();
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

KvConfig KvConfig::parse(const std::string& text) {
  KvConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("config line " + std::to_string(lineno) +
                       ": expected key = value");
    cfg.values[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return cfg;
}

KvConfig KvConfig::load_file(const std::string& path) {
  return parse(read_file(path));
}

std::string KvConfig::get(const std::string& key,
                          const std::string& fallback) const {
  const auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

double KvConfig::get_num(const std::string& key, double fallback) const {
  const auto it = values.find(key);
  if (it == values.end()) return fallback;
  double v;
  if (!parse_double(it->second, v))
    throw ParseError("config key '" + key + "': non-numeric value '" +
                     it->second + "'");
  return v;
}

bool KvConfig::get_bool(const std::string& key, bool fallback) const {
  const auto it = values.find(key);
  if (it == values.end()) return fallback;
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ParseError("config key '" + key + "': expected a boolean, got '" + v +
                   "'");
}

void atomic_write(const std::filesystem::path& path,
                  const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw SchemaError("cannot write file: " + tmp);
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

std::string hash_file(const std::string& path) {
  const std::string bytes = read_file(path);
  return to_hex(fnv1a64({bytes.data(), bytes.size()}));
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string render_meta_block(const MetaBlock& block) {
  std::ostringstream os;
  for (const auto& [k, v] : block) os << "# " << k << ": " << v << "\n";
  return os.str();
}

namespace {

MetaBlock parse_meta_block(std::istream& in, std::string& first_data_line) {
  MetaBlock block;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("# ", 0) != 0) {
      first_data_line = line;
      break;
    }
    const auto colon = line.find(": ");
    if (colon == std::string::npos) continue;
    block.emplace_back(line.substr(2, colon - 2), line.substr(colon + 2));
  }
  return block;
}

std::string meta_get(const MetaBlock& block, const std::string& key,
                     const std::string& fallback = "") {
  for (const auto& [k, v] : block)
    if (k == key) return v;
  return fallback;
}

}  // namespace

void save_fit(const std::filesystem::path& dir, const FittedModel& fm,
              const RunInfo& info, const MetaBlock& base_meta,
              const std::vector<ParamSummary>& summary) {
  std::filesystem::create_directories(dir);

  {  // draws: one row per retained draw
    std::ostringstream os;
    os << render_meta_block(base_meta);
    const auto& names = fm.param_names();
    for (std::size_t k = 0; k < names.size(); ++k)
      os << (k ? "\t" : "") << names[k];
    os << "\n";
    const auto& m = fm.samples();
    for (int t = 0; t < m.rows(); ++t) {
      for (int k = 0; k < m.cols(); ++k)
        os << (k ? "\t" : "") << format_g17(m(t, k));
      os << "\n";
    }
    atomic_write(dir / "draws.tsv", os.str());
  }

  if (info.is_bnp) {
    const auto& bnp = dynamic_cast<const BnpDraws&>(fm);
    std::ostringstream os;
    os << render_meta_block(base_meta);
    os << "draw\tindex\tmu\n";
    const auto& c = bnp.components();
    for (int t = 0; t + 1 < static_cast<int>(c.offsets.size()); ++t)
      for (int k = c.offsets[static_cast<std::size_t>(t)];
           k < c.offsets[static_cast<std::size_t>(t) + 1]; ++k)
        os << t << "\t" << c.index[static_cast<std::size_t>(k)] << "\t"
           << format_g17(c.mu[static_cast<std::size_t>(k)]) << "\n";
    atomic_write(dir / "components.tsv", os.str());
  }

  if (info.standardized) {
    std::ostringstream os;
    os << render_meta_block(base_meta);
    os << "covariate\tmean\tsd\n";
    for (std::size_t k = 0; k < info.standardization.names.size(); ++k)
      os << info.standardization.names[k] << "\t"
         << format_g17(info.standardization.mean(static_cast<int>(k))) << "\t"
         << format_g17(info.standardization.sd(static_cast<int>(k))) << "\n";
    atomic_write(dir / "standardization.tsv", os.str());
  }

  {  // human-facing summary with inclusion probabilities and diagnostics
    std::ostringstream os;
    os << render_meta_block(base_meta);
    os << "parameter\tmean\tsd\tq2.5\tq50\tq97.5\tmcse\thalfwidth95\tstabilized\n";
    for (const auto& s : summary) {
      char buf[256];
      std::snprintf(buf, sizeof(buf),
                    "%s\t%.6g\t%.6g\t%.6g\t%.6g\t%.6g\t%.6g\t%.6g\t%s\n",
                    s.name.c_str(), s.mean, s.sd, s.q025, s.q50, s.q975,
                    s.mcse, s.halfwidth95, s.stabilized ? "yes" : "no");
      os << buf;
    }
    bool any_gamma = false;
    for (const auto& s : summary) any_gamma |= s.name.rfind("gamma", 0) == 0;
    if (any_gamma) {
      os << "\ninclusion probabilities (Pr[gamma=1|data] >= .5 selects)\n";
      for (std::size_t k = 0; k < summary.size(); ++k) {
        const auto& s = summary[k];
        if (s.name.rfind("gamma", 0) != 0) continue;
        const std::size_t idx = std::stoul(s.name.substr(5));
        const std::string cov =
            idx >= 1 && idx <= info.covariate_names.size()
                ? info.covariate_names[idx - 1]
                : s.name;
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%s\t%.4f\t%s\n", cov.c_str(), s.mean,
                      s.mean >= 0.5 ? "selected" : "excluded");
        os << buf;
      }
    }
    atomic_write(dir / "summary.txt", os.str());
  }
}

LoadedFit load_fit(const std::filesystem::path& dir) {
  std::ifstream in(dir / "draws.tsv");
  if (!in) throw SchemaError("cannot open run: " + (dir / "draws.tsv").string());
  std::string header_line;
  const auto block = parse_meta_block(in, header_line);
  const auto names = split(header_line, '\t');

  std::vector<double> flat;
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split(line, '\t');
    if (cells.size() != names.size())
      throw ParseError("draws row " + std::to_string(rows + 1) +
                       ": wrong cell count");
    for (const auto& c : cells) {
      double v;
      if (!parse_double(c, v))
        throw ParseError("draws row " + std::to_string(rows + 1) +
                         ": non-numeric value '" + c + "'");
      flat.push_back(v);
    }
    ++rows;
  }
  Eigen::MatrixXd samples(rows, static_cast<int>(names.size()));
  for (int t = 0; t < rows; ++t)
    for (int k = 0; k < samples.cols(); ++k)
      samples(t, k) =
          flat[static_cast<std::size_t>(t) * names.size() +
               static_cast<std::size_t>(k)];

  LoadedFit out;
  auto& info = out.info;
  info.model = meta_get(block, "model_kind", "FE");
  info.is_bnp = info.model == "BNP";
  info.standardized = meta_get(block, "standardized", "false") == "true";

  DrawsMeta meta;
  meta.model_label = meta_get(block, "model");
  meta.seed = std::stoull(meta_get(block, "seed", "0"));
  meta.burn = std::stoi(meta_get(block, "burn", "0"));
  meta.keep = rows;
  meta.thin = std::stoi(meta_get(block, "thin", "1"));
  meta.n = std::stoi(meta_get(block, "n", "0"));
  meta.p = std::stoi(meta_get(block, "p", "0"));
  meta.window_sample = std::stoi(meta_get(block, "window_sample", "6"));
  meta.window_predict = std::stoi(meta_get(block, "window_predict", "8"));
  meta.dataset_hash = meta_get(block, "dataset_hash");
  meta.config_hash = meta_get(block, "config_hash");
  info.meta = meta;

  const std::string mode = meta_get(block, "covariate_mode", "none");
  const auto cov_mode = mode == "all" ? CovariateMode::all
                        : mode == "spike-slab" ? CovariateMode::spike_slab
                                               : CovariateMode::none;
  const std::string covs = meta_get(block, "covariates");
  if (!covs.empty()) info.covariate_names = split(covs, ',');

  if (info.standardized) {
    std::ifstream sin(dir / "standardization.tsv");
    if (!sin)
      throw SchemaError("run is standardized but standardization.tsv missing");
    std::string first;
    parse_meta_block(sin, first);  // skip meta + header
    std::vector<std::string> names_s;
    std::vector<double> means, sds;
    while (std::getline(sin, line)) {
      if (trim(line).empty()) continue;
      const auto cells = split(line, '\t');
      if (cells.size() != 3) throw ParseError("bad standardization row");
      names_s.push_back(cells[0]);
      double m, sd;
      if (!parse_double(cells[1], m) || !parse_double(cells[2], sd))
        throw ParseError("bad standardization row");
      means.push_back(m);
      sds.push_back(sd);
    }
    info.standardization.names = names_s;
    info.standardization.mean =
        Eigen::Map<Eigen::VectorXd>(means.data(), static_cast<int>(means.size()));
    info.standardization.sd =
        Eigen::Map<Eigen::VectorXd>(sds.data(), static_cast<int>(sds.size()));
  }

  if (info.is_bnp) {
    BnpConfig cfg;
    cfg.covariate_mode = cov_mode;
    cfg.window_sample = meta.window_sample;
    cfg.window_predict = meta.window_predict;
    info.bnp_config = cfg;

    ComponentTable comps;
    std::ifstream cin(dir / "components.tsv");
    if (!cin) throw SchemaError("components.tsv missing for BNP run");
    std::string first;
    parse_meta_block(cin, first);  // meta block, then header row
    comps.offsets.assign(1, 0);
    int cur = 0;
    while (std::getline(cin, line)) {
      if (trim(line).empty()) continue;
      const auto cells = split(line, '\t');
      if (cells.size() != 3) throw ParseError("bad components row");
      const int draw = std::stoi(cells[0]);
      while (cur < draw) {
        comps.offsets.push_back(static_cast<int>(comps.index.size()));
        ++cur;
      }
      double mu;
      if (!parse_double(cells[2], mu))
        throw ParseError("bad components row");
      comps.index.push_back(std::stoi(cells[1]));
      comps.mu.push_back(mu);
    }
    while (cur < rows) {
      comps.offsets.push_back(static_cast<int>(comps.index.size()));
      ++cur;
    }
    out.model = std::make_unique<BnpDraws>(cfg, names, std::move(samples),
                                           std::move(comps), meta);
  } else {
    NormalModelSpec spec;
    spec.kind = info.model == "2L"    ? ModelKind::RE2L
                : info.model == "D2L" ? ModelKind::RE2LDep
                : info.model == "3L"  ? ModelKind::RE3L
                                      : ModelKind::FE;
    spec.grouping = meta_get(block, "grouping", "by-report") == "by-study"
                        ? Grouping::by_study
                        : Grouping::by_report;
    spec.covariate_mode = cov_mode;
    info.normal_spec = spec;
    out.model =
        std::make_unique<NormalDraws>(spec, names, std::move(samples), meta);
  }
  return out;
}

Table Table::load_file(const std::string& path, char delim) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open file: " + path);
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("empty input: " + path);
  t.header = split(line, delim);
  for (auto& h : t.header) h = trim(h);
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto cells = split(line, delim);
    if (cells.size() != t.header.size())
      throw ParseError("row " + std::to_string(t.rows.size() + 1) +
                       ": expected " + std::to_string(t.header.size()) +
                       " cells");
    for (auto& c : cells) c = trim(c);
    t.rows.push_back(std::move(cells));
  }
  return t;
}

int Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

std::string svg_polyline(const std::vector<double>& x,
                         const std::vector<double>& y,
                         const std::string& title) {
  const double w = 640, h = 400, m = 40;
  double x0 = x.front(), x1 = x.back();
  double y0 = 0, y1 = 1e-300;
  for (double v : y) y1 = std::max(y1, v);
  y1 *= 1.05;

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
     << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << w / 2 << "\" y=\"20\" text-anchor=\"middle\" "
     << "font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
  os << "<line x1=\"" << m << "\" y1=\"" << h - m << "\" x2=\"" << w - m
     << "\" y2=\"" << h - m << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << m << "\" y1=\"" << m << "\" x2=\"" << m << "\" y2=\""
     << h - m << "\" stroke=\"black\"/>\n";
  os << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" "
        "points=\"";
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double px = m + (x[i] - x0) / (x1 - x0) * (w - 2 * m);
    const double py = h - m - (y[i] - y0) / (y1 - y0) * (h - 2 * m);
    os << px << "," << py << " ";
  }
  os << "\"/>\n</svg>\n";
  return os.str();
}

}  // namespace bmeta::tools
