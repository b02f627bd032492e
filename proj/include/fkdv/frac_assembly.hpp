#pragma once

// Fractional Laplacian D^a = (-Laplacian)^{a/2} (Fourier symbol |k|^a) on the
// periodic Hermite space, and the block-circulant mass, dispersion and
// H^{a/2} Gram matrices built from it.

#include "fkdv/block_circulant.hpp"
#include "fkdv/fem_space.hpp"
#include "fkdv/quadrature.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fkdv {

/// Order alpha in [1, 2).
class FractionalOrder {
public:
  explicit FractionalOrder(double alpha);
  double value() const noexcept { return alpha_; }

private:
  double alpha_;
};

enum class OperatorKind { mass, disp, gram_half };
enum class AssemblyBackend { real_space, spectral };

std::string to_string(OperatorKind kind);
std::string to_string(AssemblyBackend backend);

/// Normalization c_a of the singular-integral form
/// D^a u(x) = c_a P.V. int (u(x) - u(y)) / |x - y|^{1+a} dy.
double frac_constant(FractionalOrder alpha);

/// D^a v_j(x) for the periodic basis function v_j (dof index j = 2*node + shape).
/// Panels between kink points are integrated in closed form; periodic images by
/// a Hurwitz-zeta multipole sum.
double pv_frac_laplacian_basis(int j, double x, const Grid& grid, FractionalOrder alpha,
                               const QuadratureSpec& quad = {});

/// Same operator for D^a applied to a smooth bounded function on the real line.
/// The inner core [0, eps] uses a second-difference estimate, [eps, scale] is
/// graded, [scale, cutoff] is split into panels of width `scale`, and the
/// remainder keeps only the non-oscillatory 2 f(x) part.
struct PvOptions {
  double eps = 1e-3;
  double scale = 0.5;
  double cutoff = 2000.0;
};
double pv_frac_laplacian(const RealFn& f, double x, FractionalOrder alpha, const QuadratureSpec& quad = {},
                         const PvOptions& opt = {});

/// Offset blocks: blocks[m](s, t) pairs dof (0, s) (test function, row) with dof
/// (m, t) (trial function, column). See BlockCirculant for the convention.
using OffsetBlocks = std::vector<Eigen::Matrix2d>;

/// Real-space assembly. disp: <D^a d/dx v_j, v_i>; gram_half: <D^a v_j, v_i>.
OffsetBlocks assemble_offset_blocks(const Grid& grid, FractionalOrder alpha, const QuadratureSpec& quad,
                                    OperatorKind kind);
/// Serial version of the same assembly (reference for the OpenMP path).
OffsetBlocks assemble_offset_blocks_serial(const Grid& grid, FractionalOrder alpha,
                                           const QuadratureSpec& quad, OperatorKind kind);

/// Fourier-series assembly summing wavenumbers |l| <= m_modes (aliased onto the
/// N node frequencies). Throws QuadratureError when the estimated truncation
/// tail exceeds `tail_tol` relative to the largest symbol entry.
OffsetBlocks assemble_offset_blocks_spectral(const Grid& grid, FractionalOrder alpha, OperatorKind kind,
                                             long m_modes = 1L << 22, double tail_tol = 1e-8);

/// Dense dispersion matrix from the spectral backend.
Eigen::MatrixXd assemble_dispersion_spectral(const Grid& grid, FractionalOrder alpha,
                                             long m_modes = 1L << 22);

/// The three operators for one (grid, alpha).
struct OperatorMatrices {
  Grid grid;
  double alpha;
  BlockCirculant mass;
  BlockCirculant disp;
  BlockCirculant gram_half;

  /// Dense copy of one operator; refuses above `max_nodes` nodes.
  Eigen::MatrixXd dense(OperatorKind kind, int max_nodes = 4096) const;
};

OperatorMatrices materialize(const Grid& grid, FractionalOrder alpha, OffsetBlocks mass, OffsetBlocks disp,
                             OffsetBlocks gram_half);

struct AssemblyOptions {
  AssemblyBackend backend = AssemblyBackend::real_space;
  QuadratureSpec quad{};
  long m_modes = 1L << 22;
  /// When set, offset blocks are read from / written to this directory.
  std::optional<std::filesystem::path> cache_dir;
};

/// Assembles (or loads from cache) all three operators.
OperatorMatrices build_operators(const Grid& grid, FractionalOrder alpha, const AssemblyOptions& opt = {});

} // namespace fkdv
