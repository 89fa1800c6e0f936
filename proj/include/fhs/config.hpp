#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "fhs/extmodels.hpp"
#include "fhs/generators.hpp"
#include "fhs/sampler.hpp"

namespace fhs {

struct SimulationSpec {
  ModelKind model = ModelKind::kSimple;
  /// Regression or density truth name, or the additive setting id "1".."3".
  std::string truth = "linear";
  int n = 200;
  int replicates = 20;
  double snr = 1.0;
  /// Additive covariate count; 0 keeps the setting's own.
  int p = 0;
  /// Unset uses the model's default null class.
  std::optional<NullSpace> null;
  double level = 0.95;
  std::uint64_t master_seed = 20170601;

  void validate() const;
};

/// Default null class: linear (simple), constant (vc), quadratic (density),
/// none (additive).
NullSpace default_null(ModelKind model);

/// Reads a flat INI file with [prior], [sampler] and [simulation] sections
/// into cfg and spec, leaving unspecified keys untouched. Unknown keys raise
/// ConfigError.
void load_config(const std::filesystem::path& path, FhsConfig& cfg, SimulationSpec& spec);
void load_config(std::istream& in, FhsConfig& cfg, SimulationSpec& spec);

/// Writes every setting back in the same format.
void write_config(std::ostream& out, const FhsConfig& cfg, const SimulationSpec& spec);

}  // namespace fhs
