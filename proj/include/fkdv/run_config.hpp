#pragma once

// Run configuration for the experiment driver: a preset from the registry plus
// overrides from a flat key=value file or command-line flags.

#include "fkdv/frac_assembly.hpp"
#include "fkdv/reference_solutions.hpp"
#include "fkdv/stepper.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fkdv {

struct ReferenceChoice {
  ReferenceKind kind = ReferenceKind::closed_form;
  int resolution = 0; ///< elements for self_fine, collocation points for spectral
};

struct RunConfig {
  std::string experiment;
  std::optional<double> alpha;
  std::optional<std::vector<int>> sweep;
  std::optional<DtRule> dt_rule;
  std::optional<double> tol_factor;
  std::optional<double> t0;
  std::optional<double> t_final;
  std::optional<ReferenceChoice> reference;
  int max_fixed_point_iters = 100;
  int snapshot_intermediates = 8;
  /// run_table also writes snapshot files for each row.
  bool write_snapshots = false;
  std::filesystem::path out_dir = "out";
  int jobs = 1;
  std::optional<std::filesystem::path> cache_dir;
  AssemblyBackend backend = AssemblyBackend::real_space;
  QuadratureSpec quad{};
  /// Spectral reference time step; 0 picks one from the grid and data.
  double spectral_dt = 0.0;

  /// Throws ConfigError for an unknown experiment or out-of-range field.
  void validate() const;
};

/// "64,128,256" -> {64, 128, 256}; must be strictly increasing and >= 4.
std::vector<int> parse_sweep(const std::string& text);
/// "courant", "prop:<c>" or a plain positive number (explicit dt).
DtRule parse_dt_rule(const std::string& text);
/// "closed", "self:<M>" or "spectral:<M>".
ReferenceChoice parse_reference(const std::string& text);
std::vector<double> parse_real_list(const std::string& text);

/// Sets one field from its textual key. Throws ConfigError for unknown keys or bad values.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Flat key = value lines; '#' and ';' start comments, [section] lines are ignored.
RunConfig parse_config_text(const std::string& text);
RunConfig load_config_file(const std::filesystem::path& file);

/// The registry preset with the config's overrides applied.
ExperimentSpec resolve_experiment(const RunConfig& cfg);
/// Reference choice after overrides (defaults come from the preset).
ReferenceChoice resolve_reference(const RunConfig& cfg, const ExperimentSpec& spec);
SchemeConfig scheme_config(const RunConfig& cfg, const ExperimentSpec& spec);

} // namespace fkdv
