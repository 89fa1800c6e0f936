#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fhs/sampler.hpp"

namespace fhs {

struct RealDataSpec {
  std::filesystem::path csv_path;
  std::string response;
  /// Empty selects every other column.
  std::vector<std::string> covariates;
  int spurious = 40;
  int test_size = 30;
  int folds = 20;
  double level = 0.95;
};

struct FoldResult {
  int fold = 0;
  /// Mean squared prediction error on the standardized held-out response
  /// (NaN when test_size is 0).
  double test_error = 0.0;
  int spurious_selected = 0;
  std::vector<std::string> selected;
};

struct RealDataReport {
  std::vector<std::string> covariates;  // after dropping constant columns, spurious appended
  std::vector<std::string> dropped;
  std::vector<FoldResult> folds;
  double test_error_mean = 0.0;
  double test_error_sd = 0.0;
  double spurious_mean = 0.0;
  std::string modal_model;
};

/// Standardizes with training-split statistics, appends i.i.d. N(0, 1)
/// spurious columns, then repeats {random split, additive fit on the
/// training part, held-out error and selected set}. Test covariates outside
/// a training range are clamped to it. Writes folds.csv and aggregate.csv
/// when out_dir is non-empty.
RealDataReport run_realdata(const RealDataSpec& spec, const FhsConfig& cfg, const std::filesystem::path& out_dir = {});

}  // namespace fhs
