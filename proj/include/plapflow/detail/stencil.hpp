#pragma once

// Shared edge-stencil helpers for the flux-form p-Laplacian discretization.
//
// Values live on interior nodes; anything outside is the zero boundary. The
// gradient is reconstructed on mesh edges: the component normal to the edge is
// the difference quotient across it, the tangential component (2D) is the mean
// of the central differences at the edge's two endpoints. Each edge family
// covers the whole domain, so in 2D every edge carries weight 1/2 in the
// energy quadrature; in 1D the weight is 1.

#include <cmath>
#include <cstddef>

namespace plapflow::detail {

// Zero-padded accessor over interior node values.
struct Pad2 {
  const double* v;
  int nx, ny;
  double operator()(int i, int j) const {
    return (i >= 0 && i < nx && j >= 0 && j < ny)
               ? v[static_cast<std::size_t>(j) * nx + i]
               : 0.0;
  }
};

struct Pad1 {
  const double* v;
  int n;
  double operator()(int i) const { return (i >= 0 && i < n) ? v[i] : 0.0; }
};

// Visits the 1D edges e = 0..n (edge e sits between nodes e-1 and e).
// fn(e, Dn) with Dn the difference quotient across the edge.
template <typename Fn>
void for_each_edge_1d(const double* v, int n, double h, Fn&& fn) {
  const Pad1 u{v, n};
  const double inv_h = 1.0 / h;
  for (int e = 0; e <= n; ++e) fn(e, (u(e) - u(e - 1)) * inv_h);
}

// Visits 2D x-edges ((e,j): between nodes (e-1,j) and (e,j)) and y-edges
// ((i,e): between nodes (i,e-1) and (i,e)).
// fx(e, j, Dn, T) and fy(i, e, Dn, T); T is the averaged tangential
// difference quotient.
template <typename FnX, typename FnY>
void for_each_edge_2d(const double* v, int nx, int ny, double hx, double hy,
                      FnX&& fx, FnY&& fy) {
  const Pad2 u{v, nx, ny};
  const double inv_hx = 1.0 / hx, inv_hy = 1.0 / hy;
  for (int j = 0; j < ny; ++j) {
    for (int e = 0; e <= nx; ++e) {
      const double dn = (u(e, j) - u(e - 1, j)) * inv_hx;
      const double t = (u(e - 1, j + 1) - u(e - 1, j - 1) + u(e, j + 1) -
                        u(e, j - 1)) *
                       (0.25 * inv_hy);
      fx(e, j, dn, t);
    }
  }
  for (int e = 0; e <= ny; ++e) {
    for (int i = 0; i < nx; ++i) {
      const double dn = (u(i, e) - u(i, e - 1)) * inv_hy;
      const double t = (u(i + 1, e - 1) - u(i - 1, e - 1) + u(i + 1, e) -
                        u(i - 1, e)) *
                       (0.25 * inv_hx);
      fy(i, e, dn, t);
    }
  }
}

inline double pow_abs(double s, double e) { return std::pow(std::abs(s), e); }

// Per-edge quadrature weight in 2D. Each family covers the domain once (hence
// the 1/2); its first and last transverse rows extend to the boundary, so they
// carry 1.5 cells instead of 1 and the family tiles the unit square exactly.
inline double edge_weight_2d(int transverse_index, int transverse_count) {
  const bool rim = transverse_index == 0 || transverse_index == transverse_count - 1;
  return rim ? 0.75 : 0.5;
}

}  // namespace plapflow::detail
