#pragma once

// Crank-Nicolson Galerkin time stepping with the fixed-point inner iteration
//   (M - dt/2 D) w^{l+1} = M u^n + dt/2 D u^n + dt/2 q(w^l, u^n),   w^0 = u^n.

#include "fkdv/block_circulant.hpp"
#include "fkdv/fem_space.hpp"
#include "fkdv/frac_assembly.hpp"

#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace fkdv {

/// sup_x |v'(x)| dx^{3/2} / ||v||_{L^2} over the periodic Hermite space. The
/// supremum is attained at a node; value from sup_x g(x)^T Mhat^{-1} g(x).
inline constexpr double kInverseInequalityC2 = 9.699062279304806;

struct DtRule {
  enum class Kind { explicit_value, courant_sup, proportional };
  Kind kind = Kind::courant_sup;
  double value = 0.0; ///< dt for explicit_value, c for proportional

  static DtRule explicit_dt(double dt) { return {Kind::explicit_value, dt}; }
  static DtRule courant() { return {Kind::courant_sup, 0.0}; }
  static DtRule proportional(double c) { return {Kind::proportional, c}; }
};

struct SchemeConfig {
  FractionalOrder alpha{1.5};
  DtRule dt_rule = DtRule::courant();
  double tol_factor = 0.002;
  int max_fixed_point_iters = 100;
  double cfl_L = 0.5;
  bool enforce_cfl = false;
  QuadratureSpec quad{};
  /// false drops the convection term (linearized map).
  bool nonlinear = true;

  double cfl_K() const { return (5.0 - cfl_L) / (1.0 - cfl_L); }
  /// Throws ConfigError on invalid fields.
  void validate() const;
};

struct StepReport {
  int iters = 0;
  double final_residual = 0.0;       ///< ||w^{l+1} - w^l||_{L^2} at exit
  double tolerance = 0.0;            ///< tol_factor dx ||u^n||
  double l2_drift = 0.0;             ///< | ||u^{n+1}|| - ||u^n|| |
  double mass_drift = 0.0;           ///< | int u^{n+1} - int u^n |
  double cfl_lambda = 0.0;
  std::vector<double> residuals;     ///< one per iteration
};

struct TimeStep {
  double dt = 0.0;
  long steps = 0;
  double cfl_lambda = 0.0; ///< dt / dx^{3/2}
  double cfl_bound = 0.0;  ///< L / (2 sqrt(C2) K ||u0||)
  bool cfl_ok = true;
};

/// Applies the rule, then shrinks dt so an integer number of steps spans
/// [t0, t_final]. Warns on stderr (or throws ConfigError with enforce_cfl) when
/// the CFL bound is violated.
TimeStep choose_dt(const FemFunction& u0, double t0, double t_final, const SchemeConfig& cfg);

/// q_i = int ((w + u)/2)^2 dv_i/dx dx.
Eigen::VectorXd nonlinear_load(const FemFunction& w, const FemFunction& un, const QuadratureSpec& quad = {});

/// L^2 norm through the mass matrix (exact for Hermite functions).
double l2_norm(const FemFunction& u, const BlockCirculant& mass);

/// One operator set and time step with the system factored once.
class CrankNicolsonStepper {
public:
  CrankNicolsonStepper(const OperatorMatrices& ops, double dt, SchemeConfig cfg);

  double dt() const noexcept { return dt_; }
  const OperatorMatrices& ops() const noexcept { return *ops_; }

  /// Fixed-point step. Throws DivergenceError (carrying `index`) when the
  /// iteration does not meet the tolerance within max_fixed_point_iters.
  std::pair<FemFunction, StepReport> step(const FemFunction& un, long index = 0) const;

  /// (M - dt/2 D)^{-1} (M + dt/2 D) u: the step with the convection term removed.
  FemFunction linear_step(const FemFunction& un) const;

private:
  const OperatorMatrices* ops_;
  double dt_;
  SchemeConfig cfg_;
  CirculantSolver solver_;
};

std::pair<FemFunction, StepReport> fixed_point_step(const FemFunction& un, const OperatorMatrices& ops, double dt,
                                                    const SchemeConfig& cfg);

/// Which states a run keeps besides the initial and final ones.
struct RetainPolicy {
  enum class Kind { endpoints, evenly, all, listed };
  Kind kind = Kind::evenly;
  int intermediates = 8;
  std::vector<long> steps; ///< for Kind::listed

  static RetainPolicy all_steps() { return {Kind::all, 0, {}}; }
  static RetainPolicy endpoints() { return {Kind::endpoints, 0, {}}; }
  static RetainPolicy listed(std::vector<long> s) { return {Kind::listed, 0, std::move(s)}; }
  /// Steps interpolate_in_time needs for time t on a run with the given step count.
  static std::vector<long> steps_for_time(double t, double t0, double dt, long n_steps);
};

struct Trajectory {
  Grid grid;
  SchemeConfig config;
  double dt = 0.0;
  double t0 = 0.0;
  long n_steps = 0;
  std::vector<std::pair<long, FemFunction>> snapshots; ///< sorted by step index
  std::vector<StepReport> reports;

  double time(long n) const { return t0 + static_cast<double>(n) * dt; }
  double t_final() const { return time(n_steps); }
  const FemFunction& initial() const { return snapshots.front().second; }
  const FemFunction& final_state() const { return snapshots.back().second; }
  /// Snapshot at step n, if retained.
  const FemFunction* at_step(long n) const;
};

using StepObserver = std::function<void(long step, const FemFunction& u, const StepReport& report)>;

/// Steps from t0 to t_final with dt chosen by choose_dt. Step failures propagate
/// as DivergenceError annotated with the step index.
Trajectory run(const FemFunction& u0, double t0, double t_final, const OperatorMatrices& ops, const SchemeConfig& cfg,
               const RetainPolicy& retain = {}, const StepObserver& observer = {});

/// Piecewise-linear interpolant between half-step averages u^{n-1/2} = (u^{n-1} + u^n)/2.
/// The first half interval blends u^0 with u^{1/2}, the last one u^{N-1/2} with u^N.
FemFunction interpolate_in_time(const Trajectory& traj, double t);

} // namespace fkdv
