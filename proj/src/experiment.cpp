#include "fkdv/experiment.hpp"

#include "fkdv/binary_cache.hpp"
#include "fkdv/errors.hpp"
#include "fkdv/kernels.hpp"
#include "fkdv/spectral_oracle.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>
#include <thread>

namespace fkdv {

namespace {

constexpr unsigned kSelfReferenceKind = 3;

std::string self_reference_key(const ExperimentSpec& spec, int m, const SchemeConfig& s,
                               const AssemblyOptions& assembly) {
  return fmt::format("self-reference;experiment={};alpha={:a};a={:a};b={:a};elems={};t0={:a};t_final={:a};"
                     "dt_kind={};dt_value={:a};tol={:a};iters={};inner={};pv={};images={};image_tol={:a};"
                     "backend={};modes={}",
                     spec.name, spec.alpha, spec.a, spec.b, m, spec.t0, spec.t_final,
                     static_cast<int>(spec.dt_rule.kind), spec.dt_rule.value, s.tol_factor, s.max_fixed_point_iters,
                     s.quad.inner_pts, s.quad.pv_pts, s.quad.max_images, s.quad.image_tail_tol,
                     to_string(assembly.backend), assembly.m_modes);
}

double auto_spectral_dt(const Eigen::VectorXd& u0, const SpectralGrid& grid, double span) {
  const double kmax = 2.0 * std::numbers::pi / grid.length() * grid.size() / 3.0;
  const double umax = std::max(u0.cwiseAbs().maxCoeff(), 1e-12);
  // Lawson RK4 loses stability well before the advective limit once the data steepens
  double dt = 0.1 / (kmax * umax);
  if (span > 0.0)
    dt = std::min(dt, span / 10.0);
  return dt;
}

/// Subsample when the fine resolution is a multiple of the coarse one.
std::optional<int> stride(int fine, int coarse) {
  if (fine >= coarse && fine % coarse == 0)
    return fine / coarse;
  return std::nullopt;
}

bool same_domain(const ExperimentSpec& spec, const Grid& grid) { return grid.a() == spec.a && grid.b() == spec.b; }

} // namespace

ReferenceSampler::ReferenceSampler(const ExperimentSpec& spec, const ReferenceChoice& choice,
                                   const SchemeConfig& scheme, const AssemblyOptions& assembly, double spectral_dt)
    : spec_(spec), choice_(choice) {
  switch (choice.kind) {
  case ReferenceKind::closed_form:
    if (!spec.exact)
      throw ConfigError(fmt::format("experiment {} has no closed-form solution", spec.name));
    break;
  case ReferenceKind::self_fine: {
    const Grid fine(spec.a, spec.b, choice.resolution);
    const std::string key = self_reference_key(spec, choice.resolution, scheme, assembly);
    std::filesystem::path file;
    if (assembly.cache_dir) {
      file = *assembly.cache_dir / fmt::format("selfref-{}-{}.bin", spec.name, choice.resolution);
      if (auto hit = read_cache_record(file, kSelfReferenceKind, key);
          hit && static_cast<int>(hit->size()) == fine.n_dofs()) {
        fine_.emplace(fine, Eigen::Map<const Eigen::VectorXd>(hit->data(), fine.n_dofs()));
        break;
      }
    }
    const FemFunction u0 = l2_project(spec.initial, fine, scheme.quad);
    const OperatorMatrices ops = build_operators(fine, scheme.alpha, assembly);
    Trajectory traj = run(u0, spec.t0, spec.t_final, ops, scheme, RetainPolicy::endpoints());
    fine_.emplace(traj.final_state());
    if (assembly.cache_dir) {
      std::filesystem::create_directories(*assembly.cache_dir);
      const Eigen::VectorXd& c = fine_->coeffs();
      write_cache_record(file, kSelfReferenceKind, key, std::vector<double>(c.data(), c.data() + c.size()));
    }
    break;
  }
  case ReferenceKind::spectral: {
    const SpectralGrid sg(choice.resolution, spec.a, spec.b);
    Eigen::VectorXd u0(sg.size());
    for (int j = 0; j < sg.size(); ++j)
      u0[j] = spec.initial(sg.node(j));
    const double dt = spectral_dt > 0.0 ? spectral_dt : auto_spectral_dt(u0, sg, spec.t_final - spec.t0);
    const SpectralKey key{spec.name, spec.alpha, sg.size(), dt, spec.t0, spec.t_final};
    if (assembly.cache_dir)
      if (auto hit = load_spectral_reference(*assembly.cache_dir, key);
          hit && static_cast<int>(hit->size()) == sg.size()) {
        spectral_ = Eigen::Map<const Eigen::VectorXd>(hit->data(), sg.size());
        break;
      }
    spectral_ = spectral_reference_solve(u0, spec.alpha, spec.t0, spec.t_final, sg, dt);
    if (assembly.cache_dir)
      store_spectral_reference(*assembly.cache_dir, key,
                               std::vector<double>(spectral_.data(), spectral_.data() + spectral_.size()));
    break;
  }
  }
}

double ReferenceSampler::operator()(double x) const {
  switch (choice_.kind) {
  case ReferenceKind::closed_form:
    return spec_.exact(x, spec_.t_final);
  case ReferenceKind::self_fine:
    return eval(*fine_, x);
  case ReferenceKind::spectral:
    return spectral_eval(spectral_, SpectralGrid(choice_.resolution, spec_.a, spec_.b), x);
  }
  return 0.0;
}

Eigen::VectorXd ReferenceSampler::nodes(const Grid& grid) const {
  if (!same_domain(spec_, grid))
    throw ConfigError("reference grid does not cover the experiment domain");
  const int n = grid.n_elems();
  Eigen::VectorXd out(n);
  std::optional<int> s;
  if (choice_.kind == ReferenceKind::self_fine)
    s = stride(choice_.resolution, n);
  else if (choice_.kind == ReferenceKind::spectral)
    s = stride(static_cast<int>(spectral_.size()), n);
  for (int j = 0; j < n; ++j) {
    if (s && choice_.kind == ReferenceKind::self_fine)
      out[j] = fine_->value_coeff(j * *s);
    else if (s)
      out[j] = spectral_[j * *s];
    else
      out[j] = (*this)(grid.node(j));
  }
  return out;
}

RowOutcome run_row(const ExperimentSpec& spec, int n_elems, const SchemeConfig& scheme,
                   const AssemblyOptions& assembly, const ReferenceSampler& reference, const RetainPolicy& retain,
                   bool keep_final) {
  const auto start = std::chrono::steady_clock::now();
  RowOutcome out;
  out.row.n_elems = n_elems;
  out.stats.n_elems = n_elems;
  const Grid grid(spec.a, spec.b, n_elems);
  const double sqrt_len = std::sqrt(grid.length());
  RowStats& st = out.stats;
  auto observe = [&](long, const FemFunction&, const StepReport& rep) {
    st.max_iters = std::max(st.max_iters, rep.iters);
    if (rep.tolerance > 0.0) {
      st.max_l2_drift_ratio = std::max(st.max_l2_drift_ratio, rep.l2_drift / rep.tolerance);
      st.max_mass_drift_ratio = std::max(st.max_mass_drift_ratio, rep.mass_drift / (rep.tolerance * sqrt_len));
    }
    for (std::size_t k = 1; k < rep.residuals.size(); ++k)
      if (!(rep.residuals[k] < rep.residuals[k - 1])) {
        ++st.non_contracting_steps;
        break;
      }
  };
  try {
    const FemFunction u0 = l2_project(spec.initial, grid, scheme.quad);
    const OperatorMatrices ops = build_operators(grid, scheme.alpha, assembly);
    Trajectory traj = run(u0, spec.t0, spec.t_final, ops, scheme, retain, observe);
    st.dt = traj.dt;
    st.steps = traj.n_steps;
    st.cfl_lambda = traj.dt / std::pow(grid.dx(), 1.5);
    const FemFunction& uf = traj.final_state();
    out.row.E = relative_error(uf, reference.nodes(grid));
    out.row.C1 = mass_ratio(uf, u0);
    out.row.C2 = momentum_ratio(uf, u0);
    out.row.C3 = hamiltonian_ratio(uf, u0, ops.gram_half);
    if (keep_final)
      out.final_state = uf;
    if (retain.kind != RetainPolicy::Kind::endpoints)
      out.trajectory = std::move(traj);
  } catch (const DivergenceError& e) {
    out.row.failed = true;
    out.row.failure = e.what();
  } catch (const QuadratureError& e) {
    out.row.failed = true;
    out.row.failure = e.what();
  }
  if (out.row.failed) {
    out.row.E = out.row.C2 = std::numeric_limits<double>::quiet_NaN();
    out.row.C1.reset();
    out.row.C3.reset();
  }
  st.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

bool TableResult::any_failed() const {
  return std::any_of(rows.begin(), rows.end(), [](const auto& r) { return r.failed; });
}

bool TableResult::all_failed() const {
  return !rows.empty() && std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.failed; });
}

namespace {

std::function<double(double)> snapshot_reference(const ExperimentSpec& spec, double t) {
  if (!spec.exact || spec.alpha != find_experiment(spec.name).alpha)
    return {};
  return [exact = spec.exact, t](double x) { return exact(x, t); };
}

std::string time_tag(double t) { return fmt::format("{:.6g}", t); }

} // namespace

TableResult run_table(const RunConfig& cfg, std::ostream* log) {
  cfg.validate();
  TableResult table;
  table.spec = resolve_experiment(cfg);
  const ExperimentSpec& spec = table.spec;
  table.reference = resolve_reference(cfg, spec);
  const SchemeConfig scheme = scheme_config(cfg, spec);
  AssemblyOptions assembly;
  assembly.backend = cfg.backend;
  assembly.quad = cfg.quad;
  assembly.cache_dir = cfg.cache_dir;

  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec || !std::filesystem::is_directory(cfg.out_dir))
    throw ConfigError(fmt::format("output directory {} is not writable", cfg.out_dir.string()));

  std::mutex log_mutex;
  auto say = [&](const std::string& msg) {
    if (log == nullptr)
      return;
    std::lock_guard lock(log_mutex);
    *log << msg << '\n' << std::flush;
  };

  const std::size_t n_rows = spec.sweep.size();
  table.rows.resize(n_rows);
  table.stats.resize(n_rows);
  if (n_rows > 0) {
    say(fmt::format("{}: building reference", spec.name));
    const ReferenceSampler reference(spec, table.reference, scheme, assembly, cfg.spectral_dt);
    const RetainPolicy retain = cfg.write_snapshots
                                    ? RetainPolicy{RetainPolicy::Kind::evenly, cfg.snapshot_intermediates, {}}
                                    : RetainPolicy::endpoints();
    const int workers = std::min<int>(cfg.jobs, static_cast<int>(n_rows));
    const int threads_each = std::max(1, kernels::max_threads() / workers);
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    auto work = [&] {
      if (workers > 1)
        kernels::set_threads(threads_each);
      for (std::size_t i = next++; i < n_rows; i = next++) {
        try {
          const int n = spec.sweep[i];
          RowOutcome res = run_row(spec, n, scheme, assembly, reference, retain);
          if (res.trajectory) {
            std::lock_guard lock(log_mutex);
            for (const auto& [step, state] : res.trajectory->snapshots) {
              const double t = res.trajectory->time(step);
              emit_snapshot(*res.trajectory, t,
                            cfg.out_dir / fmt::format("{}_N{}_t{}.txt", spec.name, n, time_tag(t)),
                            snapshot_reference(spec, t));
            }
          }
          say(res.row.failed ? fmt::format("  N={:6d} FAILED: {}", n, res.row.failure)
                             : fmt::format("  N={:6d} E={:.4e} C2={:.6f} steps={} ({:.2f} s)", n, res.row.E,
                                           res.row.C2, res.stats.steps, res.stats.seconds));
          table.rows[i] = std::move(res.row);
          table.stats[i] = res.stats;
        } catch (...) {
          std::lock_guard lock(log_mutex);
          if (!error)
            error = std::current_exception();
          next = n_rows;
        }
      }
    };
    if (workers <= 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < workers; ++w)
        pool.emplace_back(work);
      for (auto& t : pool)
        t.join();
    }
    if (error)
      std::rethrow_exception(error);
  }
  fill_rates(table.rows);

  const auto csv = cfg.out_dir / fmt::format("{}.csv", spec.name);
  {
    std::ofstream out(csv);
    out << csv_header() << '\n';
    for (const auto& row : table.rows)
      out << to_csv(row) << '\n';
    if (!out)
      throw std::runtime_error(fmt::format("failed writing {}", csv.string()));
  }
  table.csv_path = csv;
  std::ofstream report(cfg.out_dir / fmt::format("{}_report.json", spec.name));
  report << table_report_json(table) << '\n';
  return table;
}

std::string table_report_json(const TableResult& table) {
  using nlohmann::json;
  json rows = json::array();
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    const auto& s = table.stats[i];
    json j{{"N", r.n_elems}, {"failed", r.failed}};
    if (r.failed) {
      j["failure"] = r.failure;
    } else {
      j["E"] = r.E;
      j["C1"] = r.C1 ? json(*r.C1) : json(nullptr);
      j["C2"] = r.C2;
      j["C3"] = r.C3 ? json(*r.C3) : json(nullptr);
      j["rate"] = r.rate ? json(*r.rate) : json(nullptr);
      j["dt"] = s.dt;
      j["steps"] = s.steps;
      j["cfl_lambda"] = s.cfl_lambda;
      j["max_iters"] = s.max_iters;
      j["max_l2_drift_ratio"] = s.max_l2_drift_ratio;
      j["max_mass_drift_ratio"] = s.max_mass_drift_ratio;
      j["non_contracting_steps"] = s.non_contracting_steps;
    }
    j["seconds"] = s.seconds;
    rows.push_back(std::move(j));
  }
  const char* ref = table.reference.kind == ReferenceKind::closed_form ? "closed"
                    : table.reference.kind == ReferenceKind::self_fine ? "self"
                                                                       : "spectral";
  json out{{"experiment", table.spec.name},
           {"alpha", table.spec.alpha},
           {"domain", {table.spec.a, table.spec.b}},
           {"t0", table.spec.t0},
           {"t_final", table.spec.t_final},
           {"reference", {{"kind", ref}, {"resolution", table.reference.resolution}}},
           {"rows", rows}};
  return out.dump(2);
}

void emit_snapshot(const Trajectory& traj, double t, const std::filesystem::path& path,
                   const std::function<double(double)>& reference) {
  const FemFunction u = interpolate_in_time(traj, t);
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  out << (reference ? "# x u reference\n" : "# x u\n");
  const Grid& g = u.grid();
  for (int j = 0; j < g.n_elems(); ++j) {
    const double x = g.node(j);
    if (reference)
      out << fmt::format("{:.17g} {:.17g} {:.17g}\n", x, u.value_coeff(j), reference(x));
    else
      out << fmt::format("{:.17g} {:.17g}\n", x, u.value_coeff(j));
  }
  if (!out)
    throw std::runtime_error(fmt::format("failed writing {}", path.string()));
}

std::vector<std::filesystem::path> snapshot_experiment(const RunConfig& cfg, int n_elems,
                                                       const std::vector<double>& times) {
  cfg.validate();
  const ExperimentSpec spec = resolve_experiment(cfg);
  const SchemeConfig scheme = scheme_config(cfg, spec);
  const Grid grid(spec.a, spec.b, n_elems);
  const FemFunction u0 = l2_project(spec.initial, grid, scheme.quad);
  const TimeStep ts = choose_dt(u0, spec.t0, spec.t_final, scheme);
  std::vector<long> steps;
  for (double t : times) {
    if (t < spec.t0 || t > spec.t_final)
      throw ConfigError(fmt::format("snapshot time {} outside [{}, {}]", t, spec.t0, spec.t_final));
    const auto s = RetainPolicy::steps_for_time(t, spec.t0, ts.dt, ts.steps);
    steps.insert(steps.end(), s.begin(), s.end());
  }
  AssemblyOptions assembly;
  assembly.backend = cfg.backend;
  assembly.quad = cfg.quad;
  assembly.cache_dir = cfg.cache_dir;
  const OperatorMatrices ops = build_operators(grid, scheme.alpha, assembly);
  const Trajectory traj = run(u0, spec.t0, spec.t_final, ops, scheme, RetainPolicy::listed(steps));
  std::vector<std::filesystem::path> files;
  for (double t : times) {
    auto path = cfg.out_dir / fmt::format("{}_N{}_t{}.txt", spec.name, n_elems, time_tag(t));
    emit_snapshot(traj, t, path, snapshot_reference(spec, t));
    files.push_back(std::move(path));
  }
  return files;
}

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

std::string VerifyReport::to_json() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& c : checks)
    list.push_back({{"name", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"passed", c.passed}});
  return nlohmann::json{{"alpha", alpha}, {"elements", n_elems}, {"passed", passed()}, {"checks", list}}.dump(2);
}

namespace {

double blocks_rel_diff(const OffsetBlocks& a, const OffsetBlocks& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t m = 0; m < a.size(); ++m) {
    num += (a[m] - b[m]).squaredNorm();
    den += b[m].squaredNorm();
  }
  return std::sqrt(num / den);
}

} // namespace

VerifyReport verify_operators(double alpha_value, int n_elems) {
  const FractionalOrder alpha(alpha_value);
  if (n_elems < 8)
    throw ConfigError("verification needs at least 8 elements");
  VerifyReport rep;
  rep.alpha = alpha_value;
  rep.n_elems = n_elems;
  auto check_le = [&](std::string name, double value, double threshold) {
    rep.checks.push_back({std::move(name), value, threshold, std::isfinite(value) && value <= threshold});
  };
  auto check_ge = [&](std::string name, double value, double threshold) {
    rep.checks.push_back({std::move(name), value, threshold, std::isfinite(value) && value >= threshold});
  };

  const Grid grid(0.0, 2.0 * std::numbers::pi, n_elems);
  const OperatorMatrices ops = build_operators(grid, alpha);
  const int cap = std::max(4096, n_elems);
  const Eigen::MatrixXd M = ops.dense(OperatorKind::mass, cap);
  const Eigen::MatrixXd D = ops.dense(OperatorKind::disp, cap);
  const Eigen::MatrixXd G = ops.dense(OperatorKind::gram_half, cap);

  check_le("mass_symmetry", (M - M.transpose()).norm() / M.norm(), 1e-13);
  const Eigen::VectorXd mass_eigs = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(M).eigenvalues();
  check_ge("mass_min_eigenvalue_rel", mass_eigs.minCoeff() / mass_eigs.maxCoeff(), 1e-8);
  check_le("disp_skew_symmetry", (D + D.transpose()).norm() / D.norm(), 1e-10);
  check_le("gram_symmetry", (G - G.transpose()).norm() / G.norm(), 1e-10);
  const Eigen::VectorXd gram_eigs = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(G).eigenvalues();
  check_ge("gram_min_eigenvalue_rel", gram_eigs.minCoeff() / gram_eigs.maxCoeff(), -1e-10);
  Eigen::VectorXd ones = Eigen::VectorXd::Zero(grid.n_dofs());
  for (int j = 0; j < n_elems; ++j)
    ones[2 * j] = 1.0;
  check_le("gram_constant_kernel", (G * ones).norm() / (G.norm() * ones.norm()), 1e-10);
  check_le("disp_constant_kernel", (D * ones).norm() / (D.norm() * ones.norm()), 1e-10);

  check_le("backend_agreement_disp",
           blocks_rel_diff(ops.disp.blocks(), assemble_offset_blocks_spectral(grid, alpha, OperatorKind::disp)),
           1e-6);
  check_le("backend_agreement_gram",
           blocks_rel_diff(ops.gram_half.blocks(),
                           assemble_offset_blocks_spectral(grid, alpha, OperatorKind::gram_half)),
           1e-6);

  double symbol_dev = 0.0;
  for (double k : {1.0, 2.0, 4.0})
    for (double x : {0.1, 0.7, 1.3, 2.9, 4.4}) {
      const double expect = std::pow(k, alpha_value) * std::sin(k * x);
      const double got = pv_frac_laplacian([k](double y) { return std::sin(k * y); }, x, alpha);
      symbol_dev = std::max(symbol_dev, std::abs(got - expect) / std::pow(k, alpha_value));
    }
  check_le("pointwise_symbol", symbol_dev, 1e-4);

  // Galerkin consistency: c^T G c for an interpolated mode against |k|^a ||sin||^2
  const double k = 2.0;
  const FemFunction s = hermite_interpolate([k](double y) { return std::sin(k * y); },
                                            [k](double y) { return k * std::cos(k * y); }, grid);
  const double energy = s.coeffs().dot(ops.gram_half.apply(s.coeffs()));
  const double expect = std::pow(k, alpha_value) * std::numbers::pi;
  check_le("galerkin_symbol", std::abs(energy - expect) / expect, n_elems >= 32 ? 1e-4 : 1e-2);
  return rep;
}

} // namespace fkdv
