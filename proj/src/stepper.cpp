#include "fkdv/stepper.hpp"

#include "fkdv/errors.hpp"
#include "fkdv/kernels.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

namespace fkdv {

void SchemeConfig::validate() const {
  if (!(tol_factor > 0.0))
    throw ConfigError("tol_factor must be positive");
  if (max_fixed_point_iters < 1)
    throw ConfigError("max_fixed_point_iters must be at least 1");
  if (!(cfl_L > 0.0 && cfl_L < 1.0))
    throw ConfigError("cfl_L must lie in (0, 1)");
  if (dt_rule.kind != DtRule::Kind::courant_sup && !(dt_rule.value > 0.0))
    throw ConfigError(fmt::format("time-step rule needs a positive value, got {}", dt_rule.value));
  quad.validate();
}

double l2_norm(const FemFunction& u, const BlockCirculant& mass) {
  return std::sqrt(std::max(0.0, u.coeffs().dot(mass.apply_direct(u.coeffs()))));
}

namespace {

double node_integral(const FemFunction& u) { return u.grid().dx() * u.nodal_values().sum(); }

} // namespace

TimeStep choose_dt(const FemFunction& u0, double t0, double t_final, const SchemeConfig& cfg) {
  cfg.validate();
  if (!(t_final >= t0))
    throw ConfigError(fmt::format("final time {} precedes initial time {}", t_final, t0));
  const double dx = u0.grid().dx();
  double dt = 0.0;
  switch (cfg.dt_rule.kind) {
  case DtRule::Kind::explicit_value:
    dt = cfg.dt_rule.value;
    break;
  case DtRule::Kind::proportional:
    dt = cfg.dt_rule.value * dx;
    break;
  case DtRule::Kind::courant_sup: {
    const double sup = sup_norm(u0);
    if (!(sup > 0.0))
      throw ConfigError("courant time-step rule needs nonzero initial data");
    dt = dx / sup;
    break;
  }
  }
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw ConfigError(fmt::format("time step must be positive, got {}", dt));
  TimeStep ts;
  const double span = t_final - t0;
  ts.steps = span > 0.0 ? static_cast<long>(std::ceil(span / dt * (1.0 - 1e-12))) : 0;
  ts.dt = ts.steps > 0 ? span / static_cast<double>(ts.steps) : dt;
  ts.cfl_lambda = ts.dt / std::pow(dx, 1.5);
  const double norm0 = l2_norm(u0);
  ts.cfl_bound = norm0 > 0.0 ? cfg.cfl_L / (2.0 * std::sqrt(kInverseInequalityC2) * cfg.cfl_K() * norm0)
                             : std::numeric_limits<double>::infinity();
  ts.cfl_ok = ts.cfl_lambda <= ts.cfl_bound;
  if (!ts.cfl_ok) {
    const std::string msg = fmt::format("CFL bound violated: lambda = {:.4g} > {:.4g}", ts.cfl_lambda, ts.cfl_bound);
    if (cfg.enforce_cfl)
      throw ConfigError(msg);
  }
  return ts;
}

Eigen::VectorXd nonlinear_load(const FemFunction& w, const FemFunction& un, const QuadratureSpec& quad) {
  if (!(w.grid() == un.grid()))
    throw ConfigError("nonlinear_load: functions live on different grids");
  return kernels::parallel::nonlinear_load(w, un, quad.inner_pts);
}

CrankNicolsonStepper::CrankNicolsonStepper(const OperatorMatrices& ops, double dt, SchemeConfig cfg)
    : ops_(&ops), dt_(dt), cfg_(std::move(cfg)), solver_(ops.mass.combine(1.0, ops.disp, -0.5 * dt)) {
  cfg_.validate();
  if (!(dt > 0.0))
    throw ConfigError("time step must be positive");
}

FemFunction CrankNicolsonStepper::linear_step(const FemFunction& un) const {
  const Eigen::VectorXd rhs = ops_->mass.apply_direct(un.coeffs()) + 0.5 * dt_ * ops_->disp.apply(un.coeffs());
  return FemFunction(un.grid(), solver_.solve(rhs));
}

std::pair<FemFunction, StepReport> CrankNicolsonStepper::step(const FemFunction& un, long index) const {
  const Grid& grid = un.grid();
  StepReport rep;
  rep.cfl_lambda = dt_ / std::pow(grid.dx(), 1.5);
  const double norm_n = l2_norm(un, ops_->mass);
  rep.tolerance = cfg_.tol_factor * grid.dx() * norm_n;

  const Eigen::VectorXd base = ops_->mass.apply_direct(un.coeffs()) + 0.5 * dt_ * ops_->disp.apply(un.coeffs());
  FemFunction w = un;
  bool converged = false;
  for (int it = 0; it < cfg_.max_fixed_point_iters; ++it) {
    Eigen::VectorXd rhs = base;
    if (cfg_.nonlinear)
      rhs += 0.5 * dt_ * nonlinear_load(w, un, cfg_.quad);
    FemFunction next(grid, solver_.solve(rhs));
    const Eigen::VectorXd diff = next.coeffs() - w.coeffs();
    const double res = std::sqrt(std::max(0.0, diff.dot(ops_->mass.apply_direct(diff))));
    w = std::move(next);
    rep.residuals.push_back(res);
    rep.iters = it + 1;
    rep.final_residual = res;
    if (!std::isfinite(res))
      break;
    if (res <= rep.tolerance || !cfg_.nonlinear) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw DivergenceError(fmt::format("fixed-point iteration failed at step {} after {} iterations (residual "
                                      "{:.3g}, tolerance {:.3g}, lambda = {:.4g}); try a smaller time step",
                                      index, rep.iters, rep.final_residual, rep.tolerance, rep.cfl_lambda),
                          index, rep.cfl_lambda);
  rep.l2_drift = std::abs(l2_norm(w, ops_->mass) - norm_n);
  rep.mass_drift = std::abs(node_integral(w) - node_integral(un));
  return {std::move(w), std::move(rep)};
}

std::pair<FemFunction, StepReport> fixed_point_step(const FemFunction& un, const OperatorMatrices& ops, double dt,
                                                    const SchemeConfig& cfg) {
  return CrankNicolsonStepper(ops, dt, cfg).step(un);
}

std::vector<long> RetainPolicy::steps_for_time(double t, double t0, double dt, long n_steps) {
  const double s = (t - t0) / dt;
  const long n = std::clamp(static_cast<long>(std::floor(s + 0.5)), 0L, n_steps);
  std::vector<long> out;
  for (long k = n - 1; k <= n + 1; ++k)
    if (k >= 0 && k <= n_steps)
      out.push_back(k);
  return out;
}

const FemFunction* Trajectory::at_step(long n) const {
  auto it = std::lower_bound(snapshots.begin(), snapshots.end(), n,
                             [](const auto& s, long v) { return s.first < v; });
  return it != snapshots.end() && it->first == n ? &it->second : nullptr;
}

Trajectory run(const FemFunction& u0, double t0, double t_final, const OperatorMatrices& ops, const SchemeConfig& cfg,
               const RetainPolicy& retain, const StepObserver& observer) {
  if (!(u0.grid() == ops.grid))
    throw ConfigError("initial data and operators use different grids");
  const TimeStep ts = choose_dt(u0, t0, t_final, cfg);
  if (!ts.cfl_ok)
    std::fprintf(stderr, "warning: CFL bound violated (lambda = %.4g > %.4g); continuing\n", ts.cfl_lambda,
                 ts.cfl_bound);
  Trajectory traj{u0.grid(), cfg, ts.dt, t0, ts.steps, {}, {}};
  std::set<long> keep{0, ts.steps};
  if (retain.kind == RetainPolicy::Kind::listed)
    keep.insert(retain.steps.begin(), retain.steps.end());
  if (retain.kind == RetainPolicy::Kind::evenly)
    for (int k = 1; k <= retain.intermediates; ++k)
      keep.insert(std::lround(static_cast<double>(k) * ts.steps / (retain.intermediates + 1)));
  traj.snapshots.emplace_back(0, u0);
  if (ts.steps == 0)
    return traj;
  const CrankNicolsonStepper stepper(ops, ts.dt, cfg);
  FemFunction u = u0;
  traj.reports.reserve(static_cast<std::size_t>(ts.steps));
  for (long n = 1; n <= ts.steps; ++n) {
    auto [next, rep] = stepper.step(u, n);
    u = std::move(next);
    if (observer)
      observer(n, u, rep);
    traj.reports.push_back(std::move(rep));
    if (retain.kind == RetainPolicy::Kind::all || keep.count(n))
      traj.snapshots.emplace_back(n, u);
  }
  return traj;
}

FemFunction interpolate_in_time(const Trajectory& traj, double t) {
  const double tol = 1e-12 * std::max(1.0, std::abs(traj.t_final()));
  if (t < traj.t0 - tol || t > traj.t_final() + tol)
    throw ConfigError(fmt::format("time {} outside the trajectory [{}, {}]", t, traj.t0, traj.t_final()));
  auto state = [&](long n) -> const FemFunction& {
    const FemFunction* u = traj.at_step(n);
    if (u == nullptr)
      throw ConfigError(fmt::format("interpolation needs step {}, which was not retained", n));
    return *u;
  };
  const long N = traj.n_steps;
  if (N == 0)
    return state(0);
  auto half = [&](long n) { // u^{n-1/2}
    return Eigen::VectorXd(0.5 * (state(n - 1).coeffs() + state(n).coeffs()));
  };
  const double s = std::clamp((t - traj.t0) / traj.dt, 0.0, static_cast<double>(N));
  Eigen::VectorXd c;
  if (s <= 0.5) {
    const double th = 2.0 * s;
    c = (1.0 - th) * state(0).coeffs() + th * half(1);
  } else if (s >= N - 0.5) {
    const double th = 2.0 * (s - (N - 0.5));
    c = (1.0 - th) * half(N) + th * state(N).coeffs();
  } else {
    const long n = static_cast<long>(std::floor(s + 0.5)); // t in [t_{n-1/2}, t_{n+1/2})
    const double th = s - (n - 0.5);
    c = (1.0 - th) * half(n) + th * half(n + 1);
  }
  return FemFunction(traj.grid, std::move(c));
}

} // namespace fkdv
