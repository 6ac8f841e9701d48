#ifndef BMETA_DATASET_HPP
#define BMETA_DATASET_HPP

#include <Eigen/Dense>
#include <istream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bmeta {

/// Column mapping for delimited-text ingestion. Every header column not named
/// here (and not excluded) is treated as a covariate.
struct CsvSchema {
  std::string y_col = "y";
  std::string var_col = "var";
  std::string study_col = "study";
  std::optional<std::string> report_col;  // default: synthetic r<row> ids
  std::vector<std::string> exclude;
  char delimiter = ',';
};

// Effect sizes y_i with sampling variances, study/report labels, and an
// n-by-p covariate block. Treated as immutable once built; safe to share
// across concurrently running model fits.
struct MetaDataset {
  Eigen::VectorXd y;
  Eigen::VectorXd var;
  std::vector<std::string> study;
  std::vector<std::string> report;
  Eigen::MatrixXd covariates;  // n x p
  std::vector<std::string> covariate_names;

  int n() const { return static_cast<int>(y.size()); }
  int p() const { return static_cast<int>(covariates.cols()); }

  // Per-record study index, studies numbered by first appearance.
  std::vector<int> study_index() const;
  // Record indices per study, in first-appearance order.
  std::vector<std::vector<int>> study_groups() const;
};

MetaDataset load_dataset(std::istream& in, const CsvSchema& schema = {});
MetaDataset load_dataset_file(const std::string& path,
                              const CsvSchema& schema = {});

struct StandardizationInfo {
  std::vector<std::string> names;
  Eigen::VectorXd mean;
  Eigen::VectorXd sd;  // n-1 divisor
};

// Centers and scales every covariate column to sample mean 0, variance 1
// (n-1 divisor). Constant columns are rejected.
std::pair<MetaDataset, StandardizationInfo> standardize_covariates(
    const MetaDataset& d);

// Maps a raw covariate point onto the standardized scale and back.
Eigen::VectorXd standardize_point(const StandardizationInfo& info,
                                  const Eigen::VectorXd& raw);
Eigen::VectorXd unstandardize_point(const StandardizationInfo& info,
                                    const Eigen::VectorXd& z);

// Which report pairs are expected to carry correlated level-2 intercepts:
// m_il = 1 iff records i != l share a study. k is the size of the largest
// study group (convention recorded in run metadata as "group-size").
struct RelatednessMatrix {
  Eigen::MatrixXi m;
  int k = 1;
};

RelatednessMatrix build_relatedness(const MetaDataset& d);

}  // namespace bmeta

#endif
