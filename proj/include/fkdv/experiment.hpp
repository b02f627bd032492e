#pragma once

// Convergence tables, snapshots and operator checks driven by a RunConfig.

#include "fkdv/diagnostics.hpp"
#include "fkdv/run_config.hpp"

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fkdv {

/// Per-row measurements beyond the table columns.
struct RowStats {
  int n_elems = 0;
  double dt = 0.0;
  long steps = 0;
  double cfl_lambda = 0.0;
  int max_iters = 0;
  /// max over steps of |d||u||| / (tol_factor dx ||u^n||)
  double max_l2_drift_ratio = 0.0;
  /// max over steps of |d int u| / (tol_factor dx ||u^n|| sqrt(b - a))
  double max_mass_drift_ratio = 0.0;
  /// steps whose fixed-point residuals failed to shrink at some iteration
  long non_contracting_steps = 0;
  double seconds = 0.0;
};

/// Final-time reference values at the nodes of any grid on the experiment's domain.
class ReferenceSampler {
public:
  /// Builds the reference (runs the fine or spectral solve when needed).
  ReferenceSampler(const ExperimentSpec& spec, const ReferenceChoice& choice, const SchemeConfig& scheme,
                   const AssemblyOptions& assembly, double spectral_dt = 0.0);

  Eigen::VectorXd nodes(const Grid& grid) const;
  /// Pointwise value at the final time.
  double operator()(double x) const;
  const ReferenceChoice& choice() const noexcept { return choice_; }

private:
  ExperimentSpec spec_;
  ReferenceChoice choice_;
  std::optional<FemFunction> fine_;
  Eigen::VectorXd spectral_;
};

struct RowOutcome {
  DiagnosticsRow row;
  RowStats stats;
  std::optional<FemFunction> final_state;
  std::optional<Trajectory> trajectory; ///< kept when snapshots were requested
};

/// One sweep row: project u0, assemble, run, compare with the reference.
/// Divergence marks the row failed instead of throwing.
RowOutcome run_row(const ExperimentSpec& spec, int n_elems, const SchemeConfig& scheme,
                   const AssemblyOptions& assembly, const ReferenceSampler& reference,
                   const RetainPolicy& retain = RetainPolicy::endpoints(), bool keep_final = false);

struct TableResult {
  ExperimentSpec spec;
  ReferenceChoice reference;
  std::vector<DiagnosticsRow> rows;
  std::vector<RowStats> stats;
  std::optional<std::filesystem::path> csv_path;

  bool any_failed() const;
  bool all_failed() const;
};

/// Runs every row of the (overridden) sweep, up to cfg.jobs at once, and writes
/// <out>/<experiment>.csv plus a JSON run report. Progress goes to `log`.
TableResult run_table(const RunConfig& cfg, std::ostream* log = nullptr);

std::string table_report_json(const TableResult& table);

/// x, u(x, t) at the nodes, plus reference(x) as a third column when given.
void emit_snapshot(const Trajectory& traj, double t, const std::filesystem::path& path,
                   const std::function<double(double)>& reference = {});

/// Runs one resolution and writes one snapshot file per requested time.
std::vector<std::filesystem::path> snapshot_experiment(const RunConfig& cfg, int n_elems,
                                                       const std::vector<double>& times);

struct VerifyCheck {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

struct VerifyReport {
  double alpha = 0.0;
  int n_elems = 0;
  std::vector<VerifyCheck> checks;

  bool passed() const;
  std::string to_json() const;
};

/// Structural and cross-backend checks of the assembled operators on [0, 2 pi).
/// Throws ConfigError for alpha outside [1, 2) or too few elements.
VerifyReport verify_operators(double alpha, int n_elems);

} // namespace fkdv
