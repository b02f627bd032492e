#pragma once

#include "fkdv/errors.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_zeta.h>

#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace fkdv::detail {

/// (r^b - 1) / b, with the b -> 0 limit log r.
inline double riesz_kernel(double r, double b) {
  const double lr = std::log(r);
  return b == 0.0 ? lr : std::expm1(b * lr) / b;
}

/// Hurwitz zeta; GSL errors become QuadratureError instead of aborting.
inline double hurwitz_zeta(double s, double q) {
  static const bool handler_off = [] {
    gsl_set_error_handler_off();
    return true;
  }();
  (void)handler_off;
  gsl_sf_result r;
  const int status = gsl_sf_hzeta_e(s, q, &r);
  if (status != GSL_SUCCESS)
    throw QuadratureError(fmt::format("hurwitz zeta({}, {}) failed: {}", s, q, gsl_strerror(status)));
  return r.val;
}

/// Binomial coefficient C(a, n) for real a.
inline double binom(double a, int n) {
  double c = 1.0;
  for (int k = 0; k < n; ++k)
    c *= (a - k) / (k + 1);
  return c;
}

} // namespace fkdv::detail
