#pragma once

// Fourier pseudo-spectral machinery, independent of the Galerkin code path:
// the symbol |k|^a applied by FFT, and an integrating-factor RK4 solver for
// u_t + (u^2/2)_x - D^a u_x = 0 used as a reference.

#include <Eigen/Dense>

namespace fkdv {

class SpectralGrid {
public:
  /// m collocation points (a power of two) on the period [a, b).
  SpectralGrid(int m, double a, double b);

  int size() const noexcept { return m_; }
  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double length() const noexcept { return b_ - a_; }
  double node(int j) const noexcept { return a_ + j * length() / m_; }
  /// Wavenumber of mode l (0 <= l <= m/2); the Nyquist mode maps to 0.
  double wavenumber(int l) const noexcept;

private:
  int m_;
  double a_;
  double b_;
};

/// Inverse transform of |k|^a u^; alpha may be any non-negative real.
Eigen::VectorXd spectral_frac_apply(const Eigen::VectorXd& samples, double alpha, const SpectralGrid& grid);

/// Band-limited interpolant of the samples evaluated at x.
double spectral_eval(const Eigen::VectorXd& samples, const SpectralGrid& grid, double x);

/// sqrt(L / m^2 * sum |u^_l|^2) over all modes: the L^2 norm from Fourier coefficients.
double spectral_l2_norm(const Eigen::VectorXd& samples, const SpectralGrid& grid);

/// Lawson RK4 with 2/3-rule dealiasing from t0 to t_final; dt is shrunk to divide
/// the interval. Throws DivergenceError at the first non-finite step.
Eigen::VectorXd spectral_reference_solve(const Eigen::VectorXd& u0_samples, double alpha, double t0, double t_final,
                                         const SpectralGrid& grid, double dt);

} // namespace fkdv
