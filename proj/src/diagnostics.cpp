#include "fkdv/diagnostics.hpp"

#include "fkdv/errors.hpp"
#include "fkdv/kernels.hpp"

#include <fmt/format.h>

#include <cmath>

namespace fkdv {

double trapezoid_on_nodes(const Eigen::VectorXd& values, double dx) { return dx * values.sum(); }

std::optional<double> mass_ratio(const FemFunction& u, const FemFunction& u0) {
  const Eigen::VectorXd v0 = u0.nodal_values();
  const double dx = u0.grid().dx();
  const double m0 = trapezoid_on_nodes(v0, dx);
  // relative to the L1 size so that round-off on odd data does not pass for mass
  if (std::abs(m0) <= 1e-10 * trapezoid_on_nodes(v0.cwiseAbs(), dx))
    return std::nullopt;
  return trapezoid_on_nodes(u.nodal_values(), u.grid().dx()) / m0;
}

double momentum_ratio(const FemFunction& u, const FemFunction& u0) {
  const double n0 = std::sqrt(trapezoid_on_nodes(u0.nodal_values().array().square().matrix(), u0.grid().dx()));
  if (!(n0 > 0.0))
    throw ConfigError("momentum ratio of zero initial data");
  return std::sqrt(trapezoid_on_nodes(u.nodal_values().array().square().matrix(), u.grid().dx())) / n0;
}

double hamiltonian(const FemFunction& u, const BlockCirculant& gram_half, int cubic_pts) {
  const double energy = u.coeffs().dot(gram_half.apply(u.coeffs()));
  return energy - kernels::parallel::cubic_integral(u, cubic_pts) / 3.0;
}

std::optional<double> hamiltonian_ratio(const FemFunction& u, const FemFunction& u0, const BlockCirculant& gram_half) {
  const double h0 = hamiltonian(u0, gram_half);
  const double scale = u0.coeffs().dot(gram_half.apply(u0.coeffs())) +
                       std::abs(kernels::parallel::cubic_integral(u0, 8)) / 3.0;
  if (!(std::abs(h0) > 1e-12 * scale))
    return std::nullopt;
  return hamiltonian(u, gram_half) / h0;
}

double relative_error(const FemFunction& u, const Eigen::VectorXd& reference_nodes) {
  if (reference_nodes.size() != u.grid().n_elems())
    throw ConfigError("reference sample count does not match the grid");
  const double ref = reference_nodes.squaredNorm();
  if (!(ref > 0.0))
    throw ConfigError("relative error against a zero reference");
  // the common dx factor cancels
  return std::sqrt((u.nodal_values() - reference_nodes).squaredNorm() / ref);
}

double relative_error(const FemFunction& u, const RealFn& reference) {
  Eigen::VectorXd r(u.grid().n_elems());
  for (int j = 0; j < r.size(); ++j)
    r[j] = reference(u.grid().node(j));
  return relative_error(u, r);
}

double convergence_rate(double e1, int n1, double e2, int n2) {
  if (!(e1 > 0.0 && e2 > 0.0))
    throw ConfigError("convergence rate needs positive errors");
  if (n1 == n2 || n1 <= 0 || n2 <= 0)
    throw ConfigError("convergence rate needs two distinct positive element counts");
  return (std::log(e1) - std::log(e2)) / (std::log(static_cast<double>(n2)) - std::log(static_cast<double>(n1)));
}

void fill_rates(std::vector<DiagnosticsRow>& rows) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].rate.reset();
    if (i == 0 || rows[i].failed || rows[i - 1].failed || !(rows[i].E > 0.0) || !(rows[i - 1].E > 0.0))
      continue;
    rows[i].rate = convergence_rate(rows[i - 1].E, rows[i - 1].n_elems, rows[i].E, rows[i].n_elems);
  }
}

std::string csv_header() { return "N,E,C1,C2,C3,rate"; }

std::string to_csv(const DiagnosticsRow& row) {
  if (row.failed)
    return fmt::format("{},nan,nan,nan,nan,", row.n_elems);
  auto opt = [](const std::optional<double>& v) { return v ? fmt::format("{:.10g}", *v) : std::string(); };
  return fmt::format("{},{:.10g},{},{:.10g},{},{}", row.n_elems, row.E, opt(row.C1), row.C2, opt(row.C3),
                     opt(row.rate));
}

} // namespace fkdv
