// fkdv: convergence tables, snapshots and operator checks for the fractional KdV solver.

#include "fkdv/errors.hpp"
#include "fkdv/experiment.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <iostream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDiverged = 3;
constexpr int kExitVerify = 4;
constexpr int kExitPartial = 1;

struct Flags {
  std::string experiment;
  std::optional<double> alpha;
  std::optional<std::string> sweep;
  std::optional<std::string> dt;
  std::optional<std::string> dt_rule;
  std::optional<double> tol_factor;
  std::optional<std::string> reference;
  std::optional<std::string> out;
  std::optional<int> jobs;
  std::optional<std::string> cache_dir;
  std::optional<std::string> backend;
  std::optional<double> t_final;
  bool snapshots = false;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--experiment", f.experiment, "preset name or config file")->required();
  cmd->add_option("--alpha", f.alpha, "fractional order in [1, 2)");
  cmd->add_option("--tol-factor", f.tol_factor, "fixed-point tolerance factor");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--cache-dir", f.cache_dir, "operator and reference cache directory");
  cmd->add_option("--backend", f.backend, "real_space or spectral assembly");
  cmd->add_option("--t-final", f.t_final, "override the final time");
  auto* dt = cmd->add_option("--dt", f.dt, "explicit time step");
  cmd->add_option("--dt-rule", f.dt_rule, "courant or prop:<c>")->excludes(dt);
}

fkdv::RunConfig make_config(const Flags& f) {
  fkdv::RunConfig cfg;
  if (std::filesystem::is_regular_file(f.experiment))
    cfg = fkdv::load_config_file(f.experiment);
  else
    cfg.experiment = f.experiment;
  if (f.alpha)
    cfg.alpha = *f.alpha;
  if (f.sweep)
    cfg.sweep = fkdv::parse_sweep(*f.sweep);
  if (f.dt)
    cfg.dt_rule = fkdv::parse_dt_rule(*f.dt);
  if (f.dt_rule)
    cfg.dt_rule = fkdv::parse_dt_rule(*f.dt_rule);
  if (f.tol_factor)
    cfg.tol_factor = *f.tol_factor;
  if (f.reference)
    cfg.reference = fkdv::parse_reference(*f.reference);
  if (f.out)
    cfg.out_dir = *f.out;
  if (f.jobs)
    cfg.jobs = *f.jobs;
  if (f.cache_dir)
    cfg.cache_dir = *f.cache_dir;
  if (f.backend)
    fkdv::apply_setting(cfg, "backend", *f.backend);
  if (f.t_final)
    cfg.t_final = *f.t_final;
  if (f.snapshots)
    cfg.write_snapshots = true;
  cfg.validate();
  return cfg;
}

int cmd_run(const Flags& f) {
  const fkdv::RunConfig cfg = make_config(f);
  const fkdv::TableResult table = fkdv::run_table(cfg, &std::cerr);
  std::cout << fkdv::csv_header() << '\n';
  for (const auto& row : table.rows)
    std::cout << fkdv::to_csv(row) << '\n';
  if (table.all_failed())
    return kExitDiverged;
  if (table.any_failed())
    return kExitPartial;
  return kExitOk;
}

int cmd_snapshot(const Flags& f, int elements, const std::string& times) {
  const fkdv::RunConfig cfg = make_config(f);
  const auto ts = fkdv::parse_real_list(times);
  if (ts.empty())
    throw fkdv::ConfigError("--times needs at least one value");
  for (const auto& p : fkdv::snapshot_experiment(cfg, elements, ts))
    std::cout << p.string() << '\n';
  return kExitOk;
}

int cmd_verify(double alpha, int elements) {
  const fkdv::VerifyReport rep = fkdv::verify_operators(alpha, elements);
  std::cout << rep.to_json() << '\n';
  return rep.passed() ? kExitOk : kExitVerify;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crank-Nicolson Hermite Galerkin solver for the fractional KdV equation"};
  app.require_subcommand(1);

  Flags run_flags;
  auto* run = app.add_subcommand("run", "convergence table for one experiment");
  add_common(run, run_flags);
  run->add_option("--sweep", run_flags.sweep, "element counts, e.g. 128,256,512");
  run->add_option("--reference", run_flags.reference, "closed, self:<M> or spectral:<M>");
  run->add_option("--jobs", run_flags.jobs, "rows solved concurrently")->check(CLI::PositiveNumber);
  run->add_flag("--snapshots", run_flags.snapshots, "also write per-row snapshot files");

  Flags snap_flags;
  int snap_elements = 0;
  std::string snap_times;
  auto* snap = app.add_subcommand("snapshot", "solution samples at chosen times");
  add_common(snap, snap_flags);
  snap->add_option("--elements", snap_elements, "number of elements")->required();
  snap->add_option("--times", snap_times, "comma-separated times")->required();

  double verify_alpha = 1.5;
  int verify_elements = 64;
  auto* verify = app.add_subcommand("verify", "operator property checks (JSON report)");
  verify->add_option("--alpha", verify_alpha, "fractional order")->required();
  verify->add_option("--elements", verify_elements, "number of elements")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run)
      return cmd_run(run_flags);
    if (*snap)
      return cmd_snapshot(snap_flags, snap_elements, snap_times);
    return cmd_verify(verify_alpha, verify_elements);
  } catch (const fkdv::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const fkdv::DivergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDiverged;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
