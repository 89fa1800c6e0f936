#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "fhs/config.hpp"
#include "fhs/sampler.hpp"

namespace fhs {

struct ReplicateResult {
  int index = 0;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
  /// 100 x empirical MSE of the posterior mean and of the unshrunk fit.
  double mse_fhs = 0.0;
  double mse_baseline = 0.0;
  double omega_mean = 0.0;
  double sigma2_mean = 0.0;
  /// Additive models only (NaN otherwise).
  double mcc = std::numeric_limits<double>::quiet_NaN();
  int true_model = 0;
  int spurious = 0;
  int selected = 0;
  /// Log-spline Metropolis acceptance (NaN otherwise).
  double acceptance = std::numeric_limits<double>::quiet_NaN();
};

struct MetricsReport {
  SimulationSpec spec;
  std::vector<ReplicateResult> replicates;
  int failures = 0;
  double mse_fhs_mean = 0.0;
  double mse_fhs_sd = 0.0;
  double mse_baseline_mean = 0.0;
  double mse_baseline_sd = 0.0;
  double omega_mean = 0.0;
  double sigma2_mean = 0.0;
  /// Share of replicates where the fHS fit beats the baseline.
  double fhs_better_rate = 0.0;
  double mcc_mean = std::numeric_limits<double>::quiet_NaN();
  double true_model_rate = std::numeric_limits<double>::quiet_NaN();
  double spurious_mean = std::numeric_limits<double>::quiet_NaN();

  double mse_ratio() const { return mse_fhs_mean / mse_baseline_mean; }
};

struct ExperimentOptions {
  bool save_draws = false;
  bool plots = true;
};

/// One replicate: generate data, fit fHS and the unshrunk baseline, score.
/// Numerical and data failures are caught and recorded in the result.
ReplicateResult run_replicate(const SimulationSpec& spec, const FhsConfig& cfg, int index,
                              const std::filesystem::path& out_dir = {}, const ExperimentOptions& opts = {});

/// Runs all replicates (OpenMP over replicates) and aggregates. With a
/// non-empty out_dir writes replicates.csv, aggregate.csv, config.ini and
/// SVG plots of the first replicate.
MetricsReport run_experiment(const SimulationSpec& spec, const FhsConfig& cfg,
                             const std::filesystem::path& out_dir = {}, const ExperimentOptions& opts = {});

/// Aggregates per-replicate results (failed replicates excluded).
MetricsReport aggregate(const SimulationSpec& spec, std::vector<ReplicateResult> replicates);

void write_replicates_csv(std::ostream& out, const std::vector<ReplicateResult>& rows);
std::vector<ReplicateResult> read_replicates_csv(std::istream& in);
void write_aggregate_csv(std::ostream& out, const MetricsReport& report);

/// Seeds for replicate `index` derived from the master seed.
std::uint64_t replicate_data_seed(std::uint64_t master, int index);
std::uint64_t replicate_chain_seed(std::uint64_t master, int index);

}  // namespace fhs
