#include "fkdv/reference_solutions.hpp"

#include "fkdv/errors.hpp"

#include <fmt/format.h>

#include <cmath>
#include <complex>
#include <numbers>

namespace fkdv {
namespace {

using cplx = std::complex<double>;

template <class T> T sech2(T z) {
  const T s = T(1) / std::cosh(z);
  return s * s;
}

double check_bo(double c, double L) {
  if (!(c > 0.0 && L > 0.0))
    throw ConfigError("bo_soliton needs c > 0 and L > 0");
  const double d = std::numbers::pi / (c * L);
  if (d > 1.0)
    throw ConfigError(fmt::format("bo_soliton: delta = {} exceeds 1", d));
  return d;
}

template <class T> T bo_impl(T x, double t, double c, double d) {
  return 2.0 * c * d * d / (1.0 - std::sqrt(1.0 - d * d) * std::cos(c * d * (x - c * t)));
}

template <class T> T kdv_one_impl(T x, double t) { return 9.0 * sech2(0.5 * std::sqrt(3.0) * (x - 3.0 * t)); }

template <class T> T kdv_two_impl(T x, double t, double a, double b) {
  const T X = std::sqrt(a / 2.0) * (x - 2.0 * a * t);
  const T Y = std::sqrt(b / 2.0) * (x - 2.0 * b * t);
  if (std::abs(std::real(Y)) <= 1.0) {
    const T sy = std::sinh(Y);
    const T den = std::sqrt(a) * std::tanh(X) * sy - std::sqrt(b) * std::cosh(Y);
    return 6.0 * (b - a) * (b + a * sech2(X) * sy * sy) / (den * den);
  }
  const T sy = std::sinh(Y);
  const T den = std::sqrt(a) * std::tanh(X) - std::sqrt(b) / std::tanh(Y);
  return 6.0 * (b - a) * (b / (sy * sy) + a * sech2(X)) / (den * den);
}

template <class F> double complex_step(F&& f, double x) {
  constexpr double h = 1e-30;
  return std::imag(f(cplx(x, h))) / h;
}

void check_two(double a, double b) {
  if (!(a > 0.0 && a < b))
    throw ConfigError(fmt::format("kdv_two_soliton needs 0 < a < b, got a = {}, b = {}", a, b));
}

} // namespace

double bo_soliton(double x, double t, double c, double L) { return bo_impl(x, t, c, check_bo(c, L)); }

double bo_soliton_dx(double x, double t, double c, double L) {
  const double d = check_bo(c, L);
  return complex_step([&](cplx z) { return bo_impl(z, t, c, d); }, x);
}

double kdv_one_soliton(double x, double t) { return kdv_one_impl(x, t); }

double kdv_one_soliton_dx(double x, double t) {
  return complex_step([&](cplx z) { return kdv_one_impl(z, t); }, x);
}

double kdv_two_soliton(double x, double t, double a, double b) {
  check_two(a, b);
  return kdv_two_impl(x, t, a, b);
}

double kdv_two_soliton_dx(double x, double t, double a, double b) {
  check_two(a, b);
  return complex_step([&](cplx z) { return kdv_two_impl(z, t, a, b); }, x);
}

double smooth_sin_data(double x) { return 0.5 * std::sin(x); }

double triangle_data(double x) { return x >= -1.0 && x < 1.0 ? 0.5 * (x + 1.0) : 0.0; }

std::vector<ExperimentSpec> builtin_experiments() {
  std::vector<ExperimentSpec> out;
  {
    ExperimentSpec e;
    e.name = "bo-one";
    e.description = "Benjamin-Ono periodic soliton, c = 0.25, L = 15, one period";
    e.alpha = 1.0;
    e.a = -15.0;
    e.b = 15.0;
    e.t0 = 0.0;
    e.t_final = 120.0;
    e.initial = [](double x) { return bo_soliton(x, 0.0); };
    e.initial_deriv = [](double x) { return bo_soliton_dx(x, 0.0); };
    e.exact = [](double x, double t) { return bo_soliton(x, t); };
    e.sweep = {64, 128, 256, 512, 1024};
    out.push_back(e);
  }
  {
    ExperimentSpec e;
    e.name = "kdv-one";
    e.description = "KdV one-soliton with alpha = 1.999, from t = -1 to t = 2";
    e.alpha = 1.999;
    e.a = -15.0;
    e.b = 15.0;
    e.t0 = -1.0;
    e.t_final = 2.0;
    e.initial = [](double x) { return kdv_one_soliton(x, -1.0); };
    e.initial_deriv = [](double x) { return kdv_one_soliton_dx(x, -1.0); };
    e.exact = [](double x, double t) { return kdv_one_soliton(x, t); };
    e.sweep = {32, 64, 128, 256, 512, 1024, 2048};
    out.push_back(e);
  }
  {
    ExperimentSpec e;
    e.name = "kdv-two";
    e.description = "KdV two-soliton (a = 0.5, b = 1) with alpha = 1.999, from t = -10 to t = 10";
    e.alpha = 1.999;
    e.a = -30.0;
    e.b = 30.0;
    e.t0 = -10.0;
    e.t_final = 10.0;
    e.initial = [](double x) { return kdv_two_soliton(x, -10.0); };
    e.initial_deriv = [](double x) { return kdv_two_soliton_dx(x, -10.0); };
    e.exact = [](double x, double t) { return kdv_two_soliton(x, t); };
    e.sweep = {256, 512, 1024, 2048, 4096};
    out.push_back(e);
  }
  {
    ExperimentSpec e;
    e.name = "smooth-sin";
    e.description = "0.5 sin(x) on [0, 2pi] with alpha = 1.5 up to T = 1";
    e.alpha = 1.5;
    e.a = 0.0;
    e.b = 2.0 * std::numbers::pi;
    e.t0 = 0.0;
    e.t_final = 1.0;
    e.initial = smooth_sin_data;
    e.initial_deriv = [](double x) { return 0.5 * std::cos(x); };
    e.reference = ReferenceKind::self_fine;
    e.sweep = {512, 1024, 2048, 4096, 8192, 16384};
    out.push_back(e);
  }
  {
    ExperimentSpec e;
    e.name = "triangle";
    e.description = "discontinuous ramp on [-1, 1) with alpha = 1.5 up to T = 0.1";
    e.alpha = 1.5;
    e.a = -10.0;
    e.b = 10.0;
    e.t0 = 0.0;
    e.t_final = 0.1;
    e.initial = triangle_data;
    e.initial_deriv = [](double x) { return x > -1.0 && x < 1.0 ? 0.5 : 0.0; };
    e.reference = ReferenceKind::self_fine;
    e.sweep = {2048, 4096, 8192, 16384, 32768};
    out.push_back(e);
  }
  return out;
}

ExperimentSpec find_experiment(const std::string& name) {
  for (auto& e : builtin_experiments())
    if (e.name == name)
      return e;
  std::string known;
  for (const auto& e : builtin_experiments())
    known += (known.empty() ? "" : ", ") + e.name;
  throw ConfigError(fmt::format("unknown experiment '{}' (known: {})", name, known));
}

} // namespace fkdv
