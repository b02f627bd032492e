#pragma once

// Error and conserved-quantity measurements for a computed solution.

#include "fkdv/block_circulant.hpp"
#include "fkdv/fem_space.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fkdv {

/// Periodic trapezoid rule: dx * sum of the node values.
double trapezoid_on_nodes(const Eigen::VectorXd& values, double dx);

/// int u / int u0 on the nodes; empty when int u0 vanishes (odd data).
std::optional<double> mass_ratio(const FemFunction& u, const FemFunction& u0);

/// ||u|| / ||u0|| with node-trapezoid norms. Throws ConfigError for zero u0.
double momentum_ratio(const FemFunction& u, const FemFunction& u0);

/// int (D^{a/2} u)^2 - u^3 / 3, with the first term as c^T G c.
double hamiltonian(const FemFunction& u, const BlockCirculant& gram_half, int cubic_pts = 8);

/// hamiltonian(u) / hamiltonian(u0); empty when the denominator is degenerate.
std::optional<double> hamiltonian_ratio(const FemFunction& u, const FemFunction& u0, const BlockCirculant& gram_half);

/// ||u - ref|| / ||ref|| with node-trapezoid norms. Throws ConfigError for a zero reference.
double relative_error(const FemFunction& u, const RealFn& reference);
double relative_error(const FemFunction& u, const Eigen::VectorXd& reference_nodes);

/// (ln e1 - ln e2) / (ln n2 - ln n1).
double convergence_rate(double e1, int n1, double e2, int n2);

struct DiagnosticsRow {
  int n_elems = 0;
  double E = 0.0;
  std::optional<double> C1;
  double C2 = 0.0;
  std::optional<double> C3;
  std::optional<double> rate;
  bool failed = false;
  std::string failure; ///< reason when failed
};

/// Fills `rate` for every row that follows a successful row.
void fill_rates(std::vector<DiagnosticsRow>& rows);

std::string csv_header();
/// One CSV line without newline. Missing values are empty fields; failed rows carry nan.
std::string to_csv(const DiagnosticsRow& row);

} // namespace fkdv
