#ifndef BMETA_TOOLS_RUN_IO_HPP
#define BMETA_TOOLS_RUN_IO_HPP

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bmeta/bnp_model.hpp"
#include "bmeta/dataset.hpp"
#include "bmeta/eval.hpp"
#include "bmeta/normal_model.hpp"

namespace bmeta::tools {

// Flat key = value configuration text; '#' starts a comment.
struct KvConfig {
  std::map<std::string, std::string> values;

  static KvConfig load_file(const std::string& path);
  static KvConfig parse(const std::string& text);

  bool has(const std::string& key) const { return values.count(key) > 0; }
  std::string get(const std::string& key, const std::string& fallback) const;
  double get_num(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
};

// Whole-file atomic write: temp file in the same directory, then rename.
void atomic_write(const std::filesystem::path& path,
                  const std::string& content);

std::string hash_file(const std::string& path);

std::string format_g17(double v);

// What a fit run needs beyond the draw matrix to be reloaded and evaluated.
struct RunInfo {
  std::string model;  // FE | 2L | D2L | 3L | BNP
  NormalModelSpec normal_spec;
  BnpConfig bnp_config;
  bool is_bnp = false;
  bool standardized = false;
  StandardizationInfo standardization;
  std::vector<std::string> covariate_names;
  DrawsMeta meta;
};

using MetaBlock = std::vector<std::pair<std::string, std::string>>;

std::string render_meta_block(const MetaBlock& block);

void save_fit(const std::filesystem::path& dir, const FittedModel& fm,
              const RunInfo& info, const MetaBlock& base_meta,
              const std::vector<ParamSummary>& summary);

struct LoadedFit {
  std::unique_ptr<FittedModel> model;
  RunInfo info;
};

LoadedFit load_fit(const std::filesystem::path& dir);

// Generic delimited table for the effect-size converter.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  static Table load_file(const std::string& path, char delim);
  int column(const std::string& name) const;  // -1 when absent
};

// Minimal line-plot rendering of (x, f(x)) series.
std::string svg_polyline(const std::vector<double>& x,
                         const std::vector<double>& y,
                         const std::string& title);

}  // namespace bmeta::tools

#endif
