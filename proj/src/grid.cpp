#include "plapflow/grid.hpp"

#include <cmath>
#include <string>

#include "plapflow/detail/stencil.hpp"

namespace plapflow {

Grid build_grid(int dim, const std::vector<int>& n_per_axis) {
  if (dim != 1 && dim != 2)
    throw ConfigError("build_grid: dim must be 1 or 2, got " + std::to_string(dim));
  if (n_per_axis.size() != static_cast<std::size_t>(dim))
    throw ConfigError("build_grid: expected " + std::to_string(dim) +
                      " interior node counts, got " + std::to_string(n_per_axis.size()));
  Grid g;
  g.dim_ = dim;
  g.num_nodes_ = 1;
  for (int a = 0; a < dim; ++a) {
    const int n = n_per_axis[static_cast<std::size_t>(a)];
    if (n < 3)
      throw ConfigError("build_grid: need at least 3 interior nodes per axis, got " +
                        std::to_string(n));
    g.n_[static_cast<std::size_t>(a)] = n;
    g.h_[static_cast<std::size_t>(a)] = 1.0 / (n + 1);
    g.num_nodes_ *= static_cast<std::size_t>(n);
  }
  return g;
}

GridFunction::GridFunction(const Grid& grid, std::vector<double> values)
    : grid_(grid), v_(std::move(values)) {
  if (v_.size() != grid_.num_nodes())
    throw ConfigError("GridFunction: value count does not match grid node count");
}

void GridFunction::check_finite(const char* what) const {
  for (double x : v_)
    if (!std::isfinite(x)) throw IntegrityError(std::string(what) + ": non-finite entry");
}

double norm_sup(const GridFunction& f) {
  double m = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) m = std::max(m, std::abs(f[k]));
  return m;
}

double norm_Lq(const GridFunction& f, double q) {
  if (!(q > 1.0)) throw ConfigError("norm_Lq: q must exceed 1");
  double s = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) s += detail::pow_abs(f[k], q);
  return std::pow(s * f.grid().cell_measure(), 1.0 / q);
}

double seminorm_grad_p(const GridFunction& f, double p) {
  if (!(p >= 2.0)) throw ConfigError("seminorm_grad_p: p must be at least 2");
  const Grid& g = f.grid();
  double s = 0.0;
  if (g.dim() == 1) {
    detail::for_each_edge_1d(f.values().data(), g.n(0), g.h(0),
                             [&](int, double dn) { s += detail::pow_abs(dn, p); });
  } else {
    const int nx = g.n(0), ny = g.n(1);
    detail::for_each_edge_2d(
        f.values().data(), nx, ny, g.h(0), g.h(1),
        [&](int, int j, double dn, double t) {
          s += detail::edge_weight_2d(j, ny) * std::pow(dn * dn + t * t, 0.5 * p);
        },
        [&](int i, int, double dn, double t) {
          s += detail::edge_weight_2d(i, nx) * std::pow(dn * dn + t * t, 0.5 * p);
        });
  }
  return std::pow(s * g.cell_measure(), 1.0 / p);
}

double inner_L2(const GridFunction& a, const GridFunction& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s * a.grid().cell_measure();
}

}  // namespace plapflow
