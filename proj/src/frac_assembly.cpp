#include "fkdv/frac_assembly.hpp"

#include "fkdv/binary_cache.hpp"
#include "fkdv/errors.hpp"
#include "fkdv/kernels.hpp"

#include "frac_common.hpp"

#include <fmt/format.h>

#include <array>
#include <cmath>
#include <numbers>

namespace fkdv {

FractionalOrder::FractionalOrder(double alpha) : alpha_(alpha) {
  if (!(alpha >= 1.0 && alpha < 2.0))
    throw ConfigError(fmt::format("alpha must lie in [1, 2), got {}", alpha));
}

std::string to_string(OperatorKind kind) {
  switch (kind) {
  case OperatorKind::mass:
    return "mass";
  case OperatorKind::disp:
    return "disp";
  case OperatorKind::gram_half:
    return "gram_half";
  }
  return "?";
}

std::string to_string(AssemblyBackend backend) {
  return backend == AssemblyBackend::real_space ? "real_space" : "spectral";
}

double frac_constant(FractionalOrder alpha) {
  const double a = alpha.value();
  return a * std::exp2(a - 1.0) * std::tgamma(0.5 * (1.0 + a)) /
         (std::sqrt(std::numbers::pi) * std::tgamma(1.0 - 0.5 * a));
}

namespace {

// Real-space route. With b = 1 - a, D^a u = -K_b int u''(y) E_b(|x - y|) dy where
// E_b(r) = (r^b - 1)/b; the constant part drops because int u'' = 0. Two
// integrations by parts give
//   <D^a v_t, v_s> = K_b int int v_s'(x) v_t'(y) E_b(|x - y|) dx dy,
// and the dispersion entry is the same with v_t'' in place of v_t'. In reference
// coordinates this is a 1-D integral of the correlation
//   C(sig) = int phi_s'(xi) psi_t(xi - sig) dxi,   sig in [-2, 2],
// against E_b(|sig - R|) summed over the images R = m + kN.
class RealSpaceAssembler {
public:
  static constexpr int kDegree = 5;    // correlation pieces are polynomials of degree <= 5
  static constexpr double kNear = 8.0; // images with |R| <= kNear are integrated directly

  RealSpaceAssembler(const Grid& grid, FractionalOrder alpha, const QuadratureSpec& quad, OperatorKind kind)
      : n_(grid.n_elems()), quad_(quad), beta_(1.0 - alpha.value()) {
    kb_ = beta_ == 0.0 ? -1.0 / std::numbers::pi
                       : -beta_ / (2.0 * std::tgamma(1.0 + beta_) * std::sin(0.5 * std::numbers::pi * beta_));
    scale_ = kb_ * std::pow(grid.dx(), kind == OperatorKind::disp ? beta_ - 1.0 : beta_);
    const int order = kind == OperatorKind::disp ? 2 : 1;
    for (int s = 0; s < 2; ++s)
      for (int t = 0; t < 2; ++t)
        fit_pieces(s, t, order);
    max_order_ = quad.max_images;
    const auto& gl = gauss_legendre((kDegree + max_order_) / 2 + 2);
    for (int e = 0; e < 4; ++e)
      for (int n = 0; n <= max_order_; ++n) {
        double mu = 0.0;
        for (int p = 0; p < 4; ++p)
          mu += gl.integrate([&](double r) { return poly(e, p, r) * std::pow(p - 2 + r, n); }, 0.0, 1.0);
        moments_[e].push_back(mu);
      }
    const auto& far = gauss_legendre(20);
    far_nodes_ = far.nodes();
    far_weights_ = far.weights();
  }

  Eigen::Matrix2d block(int m) const {
    std::array<double, 4> acc{};
    // near images
    const int k_lo = static_cast<int>(std::ceil((-kNear - m) / n_));
    const int k_hi = static_cast<int>(std::floor((kNear - m) / n_));
    for (int k = k_lo; k <= k_hi; ++k) {
      const int R = m + k * n_;
      for (int e = 0; e < 4; ++e)
        for (int p = 0; p < 4; ++p)
          acc[static_cast<std::size_t>(e)] += piece_integral(e, p, p - 2 - R);
    }
    // far images: E_b(|sig - R|) expanded in sig/R, lattice sums by Hurwitz zeta
    const int q_plus = static_cast<int>(std::floor((kNear - m) / n_)) + 1;
    const int p_minus = static_cast<int>(std::floor((kNear + m) / n_)) + 1;
    const double r_min = std::min(m + double(q_plus) * n_, double(p_minus) * n_ - m);
    const double ratio = 2.0 / r_min;
    const int n_max = static_cast<int>(std::ceil(std::log(quad_.image_tail_tol) / std::log(ratio))) + 1;
    if (n_max > max_order_)
      throw QuadratureError(fmt::format("image multipole needs order {} > max_images = {}", n_max, max_order_));
    const double frac = static_cast<double>(m) / n_;
    double c = 1.0; // c_n = binom(b, n) / b
    for (int n = 1; n <= n_max; ++n) {
      if (n >= 2) {
        const double s = n - beta_;
        const double ns = std::pow(static_cast<double>(n_), -s);
        const double s_plus = ns * detail::hurwitz_zeta(s, q_plus + frac);
        const double s_minus = ns * detail::hurwitz_zeta(s, p_minus - frac);
        const double lattice = (n % 2 ? -s_plus : s_plus) + s_minus;
        for (int e = 0; e < 4; ++e)
          acc[static_cast<std::size_t>(e)] += c * moments_[e][static_cast<std::size_t>(n)] * lattice;
      }
      c *= (beta_ - n) / (n + 1);
    }
    Eigen::Matrix2d b;
    b << acc[0], acc[1], acc[2], acc[3];
    return scale_ * b;
  }

private:
  static int entry(int s, int t) { return 2 * s + t; }

  // Correlation C(sig) at one point, by exact piecewise Gauss integration.
  static double correlation(int s, int t, int order, double sig) {
    const auto& gl = gauss_legendre(4);
    double sum = 0.0;
    for (int a = 0; a < 2; ++a) {
      const Cubic& P = shape_piece(static_cast<Shape>(s), a);
      for (int b = 0; b < 2; ++b) {
        const Cubic& Q = shape_piece(static_cast<Shape>(t), b);
        const double lo = std::max(a - 1.0, b - 1.0 + sig);
        const double hi = std::min(static_cast<double>(a), b + sig);
        if (hi <= lo)
          continue;
        sum += gl.integrate(
            [&](double xi) { return P.d1(xi) * (order == 1 ? Q.d1(xi - sig) : Q.d2(xi - sig)); }, lo, hi);
      }
    }
    return sum;
  }

  void fit_pieces(int s, int t, int order) {
    constexpr int n = kDegree + 1;
    Eigen::Matrix<double, n, n> V;
    std::array<double, n> rho{};
    for (int i = 0; i < n; ++i) {
      rho[static_cast<std::size_t>(i)] = 0.5 - 0.5 * std::cos(std::numbers::pi * (i + 0.5) / n);
      for (int k = 0; k < n; ++k)
        V(i, k) = std::pow(rho[static_cast<std::size_t>(i)], k);
    }
    const auto lu = V.fullPivLu();
    for (int p = 0; p < 4; ++p) {
      Eigen::Matrix<double, n, 1> y;
      for (int i = 0; i < n; ++i)
        y[i] = correlation(s, t, order, p - 2 + rho[static_cast<std::size_t>(i)]);
      const Eigen::Matrix<double, n, 1> c = lu.solve(y);
      for (int k = 0; k < n; ++k)
        coef_[entry(s, t)][p][k] = c[k];
    }
  }

  double poly(int e, int p, double r) const {
    const auto& c = coef_[e][p];
    double v = 0.0;
    for (int k = kDegree; k >= 0; --k)
      v = v * r + c[k];
    return v;
  }

  // int_0^1 C(p - 2 + r) E_b(|r + D|) dr for the integer shift D = p - 2 - R.
  double piece_integral(int e, int p, int D) const {
    const auto& c = coef_[e][p];
    if (D == 0 || D == -1) {
      std::array<double, kDegree + 1> w = c;
      if (D == -1) {
        // substitute r = 1 - u so the singular point sits at u = 0
        for (int k = 0; k <= kDegree; ++k)
          w[k] = 0.0;
        for (int k = 0; k <= kDegree; ++k)
          for (int j = 0; j <= k; ++j)
            w[j] += c[k] * detail::binom(k, j) * (j % 2 ? -1.0 : 1.0);
      }
      double sum = 0.0;
      for (int k = 0; k <= kDegree; ++k)
        sum -= w[k] / ((k + 1.0) * (k + 1.0 + beta_));
      return sum;
    }
    double sum = 0.0;
    for (std::size_t g = 0; g < far_nodes_.size(); ++g) {
      const double r = far_nodes_[g];
      sum += far_weights_[g] * poly(e, p, r) * detail::riesz_kernel(std::abs(r + D), beta_);
    }
    return sum;
  }

  int n_;
  QuadratureSpec quad_;
  double beta_;
  double kb_ = 0.0;
  double scale_ = 0.0;
  int max_order_ = 0;
  // coef_[entry][piece][power]; piece p covers sig in [p - 2, p - 1]
  std::array<std::array<std::array<double, kDegree + 1>, 4>, 4> coef_{};
  std::array<std::vector<double>, 4> moments_;
  std::vector<double> far_nodes_;
  std::vector<double> far_weights_;
};

OffsetBlocks mass_blocks(const Grid& grid) {
  const auto mb = hermite_mass_blocks(grid.dx());
  OffsetBlocks out(static_cast<std::size_t>(grid.n_elems()), Eigen::Matrix2d::Zero());
  out[0] = mb[0];
  out[1] = mb[1];
  out[static_cast<std::size_t>(grid.n_elems() - 1)] = mb[2];
  return out;
}

template <class Driver>
OffsetBlocks assemble_with(const Grid& grid, FractionalOrder alpha, const QuadratureSpec& quad, OperatorKind kind,
                           Driver&& drive) {
  quad.validate();
  if (kind == OperatorKind::mass)
    return mass_blocks(grid);
  const RealSpaceAssembler assembler(grid, alpha, quad, kind);
  return drive(grid.n_elems(), [&](int m) { return assembler.block(m); });
}

} // namespace

OffsetBlocks assemble_offset_blocks(const Grid& grid, FractionalOrder alpha, const QuadratureSpec& quad,
                                    OperatorKind kind) {
  return assemble_with(grid, alpha, quad, kind, kernels::parallel::offset_blocks);
}

OffsetBlocks assemble_offset_blocks_serial(const Grid& grid, FractionalOrder alpha, const QuadratureSpec& quad,
                                           OperatorKind kind) {
  return assemble_with(grid, alpha, quad, kind, kernels::serial::offset_blocks);
}

Eigen::MatrixXd OperatorMatrices::dense(OperatorKind kind, int max_nodes) const {
  if (grid.n_elems() > max_nodes)
    throw ConfigError(fmt::format("refusing to materialize a dense {0}x{0} matrix", grid.n_dofs()));
  switch (kind) {
  case OperatorKind::mass:
    return mass.dense();
  case OperatorKind::disp:
    return disp.dense();
  case OperatorKind::gram_half:
    return gram_half.dense();
  }
  return {};
}

OperatorMatrices materialize(const Grid& grid, FractionalOrder alpha, OffsetBlocks mass, OffsetBlocks disp,
                             OffsetBlocks gram_half) {
  const auto n = static_cast<std::size_t>(grid.n_elems());
  if (mass.size() != n || disp.size() != n || gram_half.size() != n)
    throw ConfigError("offset block count does not match the grid");
  return OperatorMatrices{grid, alpha.value(), BlockCirculant(std::move(mass)), BlockCirculant(std::move(disp)),
                          BlockCirculant(std::move(gram_half))};
}

OperatorMatrices build_operators(const Grid& grid, FractionalOrder alpha, const AssemblyOptions& opt) {
  auto get = [&](OperatorKind kind) {
    if (kind == OperatorKind::mass)
      return mass_blocks(grid);
    std::optional<OffsetBlockKey> key;
    if (opt.cache_dir) {
      key = OffsetBlockKey{alpha.value(), grid.n_elems(), grid.length(), opt.quad, kind, opt.backend, opt.m_modes};
      if (auto hit = load_offset_blocks(*opt.cache_dir, *key))
        return std::move(*hit);
    }
    OffsetBlocks blocks = opt.backend == AssemblyBackend::real_space
                              ? assemble_offset_blocks(grid, alpha, opt.quad, kind)
                              : assemble_offset_blocks_spectral(grid, alpha, kind, opt.m_modes);
    if (key)
      store_offset_blocks(*opt.cache_dir, *key, blocks);
    return blocks;
  };
  return materialize(grid, alpha, get(OperatorKind::mass), get(OperatorKind::disp), get(OperatorKind::gram_half));
}

} // namespace fkdv
