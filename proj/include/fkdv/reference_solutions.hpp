#pragma once

// Closed-form solutions and initial data for the built-in experiments.

#include "fkdv/fem_space.hpp"
#include "fkdv/stepper.hpp"

#include <functional>
#include <string>
#include <vector>

namespace fkdv {

/// Periodic Benjamin-Ono travelling wave of u_t + u u_x - H u_xx = 0,
/// u = 2 c d^2 / (1 - sqrt(1 - d^2) cos(c d (x - c t))), d = pi / (c L); period 2L in x - ct.
/// Throws ConfigError unless c > 0, L > 0 and d <= 1.
double bo_soliton(double x, double t, double c = 0.25, double L = 15.0);

/// KdV soliton of u_t + u u_x + u_xxx = 0 with speed 3: 9 sech^2(sqrt(3)/2 (x - 3t)).
double kdv_one_soliton(double x, double t);

/// KdV two-soliton of u_t + u u_x + u_xxx = 0 (parameters 0 < a < b). The removable
/// pole of csch at x = 2bt is handled by multiplying through by sinh^2.
double kdv_two_soliton(double x, double t, double a = 0.5, double b = 1.0);

double smooth_sin_data(double x);
/// (x + 1)/2 on [-1, 1), zero elsewhere.
double triangle_data(double x);

/// d/dx of the closed forms (complex-step differentiation).
double bo_soliton_dx(double x, double t, double c = 0.25, double L = 15.0);
double kdv_one_soliton_dx(double x, double t);
double kdv_two_soliton_dx(double x, double t, double a = 0.5, double b = 1.0);

enum class ReferenceKind { closed_form, self_fine, spectral };

struct ExperimentSpec {
  std::string name;
  std::string description;
  double alpha = 1.5;
  double a = 0.0;
  double b = 1.0;
  double t0 = 0.0;
  double t_final = 1.0;
  RealFn initial;
  RealFn initial_deriv;
  /// u(x, t); empty when no closed form exists.
  std::function<double(double, double)> exact;
  ReferenceKind reference = ReferenceKind::closed_form;
  int self_reference_elems = 1 << 16;
  int spectral_modes = 1 << 12;
  std::vector<int> sweep;
  DtRule dt_rule = DtRule::courant();
};

std::vector<ExperimentSpec> builtin_experiments();
/// Throws ConfigError for an unknown name.
ExperimentSpec find_experiment(const std::string& name);

} // namespace fkdv
