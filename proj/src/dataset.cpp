#include "bmeta/dataset.hpp"

#include "bmeta/util.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "bmeta/errors.hpp"

namespace bmeta {

namespace {

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, delim)) out.push_back(cell);
  if (!line.empty() && line.back() == delim) out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& cell, int row, const std::string& col) {
  const std::string t = trim(cell);
  if (t.empty())
    throw ParseError("row " + std::to_string(row) + ": empty value in column '" +
                     col + "'");
  double v;
  if (!parse_double(t, v))
    throw ParseError("row " + std::to_string(row) + ": non-numeric value '" +
                     t + "' in column '" + col + "'");
  return v;
}

}  // namespace

std::vector<int> MetaDataset::study_index() const {
  std::unordered_map<std::string, int> ids;
  std::vector<int> idx(study.size());
  for (std::size_t i = 0; i < study.size(); ++i) {
    auto [it, inserted] = ids.emplace(study[i], static_cast<int>(ids.size()));
    idx[i] = it->second;
  }
  return idx;
}

std::vector<std::vector<int>> MetaDataset::study_groups() const {
  const auto idx = study_index();
  int g = 0;
  for (int v : idx) g = std::max(g, v + 1);
  std::vector<std::vector<int>> groups(static_cast<std::size_t>(g));
  for (std::size_t i = 0; i < idx.size(); ++i)
    groups[static_cast<std::size_t>(idx[i])].push_back(static_cast<int>(i));
  return groups;
}

MetaDataset load_dataset(std::istream& in, const CsvSchema& schema) {
  std::string line;
  // leading comment lines hold run metadata; the header follows them
  do {
    if (!std::getline(in, line)) throw SchemaError("empty input: no header row");
  } while (!line.empty() && line[0] == '#');
  auto header = split_line(line, schema.delimiter);
  for (auto& h : header) h = trim(h);

  auto find_col = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw SchemaError("required column '" + name + "' not found in header");
    return static_cast<int>(it - header.begin());
  };

  const int ci_y = find_col(schema.y_col);
  const int ci_var = find_col(schema.var_col);
  const int ci_study = find_col(schema.study_col);
  int ci_report = -1;
  if (schema.report_col) ci_report = find_col(*schema.report_col);

  std::vector<int> cov_cols;
  std::vector<std::string> cov_names;
  for (int c = 0; c < static_cast<int>(header.size()); ++c) {
    if (c == ci_y || c == ci_var || c == ci_study || c == ci_report) continue;
    if (std::find(schema.exclude.begin(), schema.exclude.end(), header[c]) !=
        schema.exclude.end())
      continue;
    cov_cols.push_back(c);
    cov_names.push_back(header[static_cast<std::size_t>(c)]);
  }

  std::vector<double> ys, vars;
  std::vector<std::string> studies, reports;
  std::vector<double> cov_flat;  // row-major
  int row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    auto cells = split_line(line, schema.delimiter);
    if (cells.size() != header.size())
      throw ParseError("row " + std::to_string(row) + ": expected " +
                       std::to_string(header.size()) + " cells, found " +
                       std::to_string(cells.size()));
    const double yv = parse_number(cells[static_cast<std::size_t>(ci_y)], row,
                                   schema.y_col);
    const double vv = parse_number(cells[static_cast<std::size_t>(ci_var)],
                                   row, schema.var_col);
    if (!(vv > 0.0))
      throw DomainError("row " + std::to_string(row) +
                        ": sampling variance must be > 0, got " +
                        std::to_string(vv));
    ys.push_back(yv);
    vars.push_back(vv);
    studies.push_back(trim(cells[static_cast<std::size_t>(ci_study)]));
    if (studies.back().empty())
      throw DomainError("row " + std::to_string(row) + ": empty study label");
    reports.push_back(ci_report >= 0
                          ? trim(cells[static_cast<std::size_t>(ci_report)])
                          : "r" + std::to_string(row));
    for (std::size_t k = 0; k < cov_cols.size(); ++k)
      cov_flat.push_back(
          parse_number(cells[static_cast<std::size_t>(cov_cols[k])], row,
                       cov_names[k]));
  }
  if (row == 0) throw InsufficientDataError("dataset has no data rows");

  std::unordered_set<std::string> seen;
  for (const auto& r : reports)
    if (!seen.insert(r).second)
      throw DomainError("duplicate report id '" + r + "'");

  MetaDataset d;
  const int n = row, p = static_cast<int>(cov_cols.size());
  d.y = Eigen::Map<Eigen::VectorXd>(ys.data(), n);
  d.var = Eigen::Map<Eigen::VectorXd>(vars.data(), n);
  d.study = std::move(studies);
  d.report = std::move(reports);
  d.covariate_names = std::move(cov_names);
  d.covariates.resize(n, p);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < p; ++k)
      d.covariates(i, k) = cov_flat[static_cast<std::size_t>(i * p + k)];
  return d;
}

MetaDataset load_dataset_file(const std::string& path,
                              const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open dataset file: " + path);
  return load_dataset(in, schema);
}

std::pair<MetaDataset, StandardizationInfo> standardize_covariates(
    const MetaDataset& d) {
  if (d.p() < 1)
    throw InsufficientDataError("standardize_covariates: no covariates");
  if (d.n() < 2)
    throw InsufficientDataError(
        "standardize_covariates: need at least 2 records");
  MetaDataset out = d;
  StandardizationInfo info;
  info.names = d.covariate_names;
  info.mean.resize(d.p());
  info.sd.resize(d.p());
  const double n = d.n();
  for (int k = 0; k < d.p(); ++k) {
    const double m = d.covariates.col(k).mean();
    const double ss = (d.covariates.col(k).array() - m).square().sum();
    const double sd = std::sqrt(ss / (n - 1.0));
    if (!(sd > 0.0))
      throw DegenerateError("constant covariate column '" +
                            d.covariate_names[static_cast<std::size_t>(k)] +
                            "'");
    info.mean(k) = m;
    info.sd(k) = sd;
    out.covariates.col(k) = (d.covariates.col(k).array() - m) / sd;
  }
  return {std::move(out), std::move(info)};
}

Eigen::VectorXd standardize_point(const StandardizationInfo& info,
                                  const Eigen::VectorXd& raw) {
  return (raw - info.mean).cwiseQuotient(info.sd);
}

Eigen::VectorXd unstandardize_point(const StandardizationInfo& info,
                                    const Eigen::VectorXd& z) {
  return info.mean + z.cwiseProduct(info.sd);
}

RelatednessMatrix build_relatedness(const MetaDataset& d) {
  const auto idx = d.study_index();
  const int n = d.n();
  RelatednessMatrix rel;
  rel.m = Eigen::MatrixXi::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < n; ++l)
      if (i != l && idx[static_cast<std::size_t>(i)] ==
                        idx[static_cast<std::size_t>(l)])
        rel.m(i, l) = 1;
  int k = 1;
  for (const auto& g : d.study_groups())
    k = std::max(k, static_cast<int>(g.size()));
  rel.k = k;
  return rel;
}

}  // namespace bmeta
