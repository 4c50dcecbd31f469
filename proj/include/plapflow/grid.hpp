#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "plapflow/errors.hpp"

namespace plapflow {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Uniform rectilinear mesh on (0,1)^dim with homogeneous Dirichlet boundary.
/// Only interior nodes are represented; boundary values are implicitly zero.
class Grid {
 public:
  Grid() = default;

  int dim() const { return dim_; }
  int n(int axis) const { return n_[static_cast<std::size_t>(axis)]; }
  double h(int axis) const { return h_[static_cast<std::size_t>(axis)]; }

  // Product of the per-axis interior node counts.
  std::size_t num_nodes() const { return num_nodes_; }
  // h^dim, the quadrature weight of one node (or edge) cell.
  double cell_measure() const { return dim_ == 1 ? h_[0] : h_[0] * h_[1]; }

  std::size_t index(int i, int j = 0) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(n_[0]) +
           static_cast<std::size_t>(i);
  }
  Point coord(std::size_t node) const {
    const int nx = n_[0];
    const int i = static_cast<int>(node % static_cast<std::size_t>(nx));
    const int j = static_cast<int>(node / static_cast<std::size_t>(nx));
    Point pt;
    pt.x = (i + 1) * h_[0];
    pt.y = dim_ == 2 ? (j + 1) * h_[1] : 0.0;
    return pt;
  }

  bool operator==(const Grid& other) const {
    return dim_ == other.dim_ && n_ == other.n_;
  }

  friend Grid build_grid(int dim, const std::vector<int>& n_per_axis);

 private:
  int dim_ = 0;
  std::array<int, 2> n_ = {0, 0};
  std::array<double, 2> h_ = {0.0, 0.0};
  std::size_t num_nodes_ = 0;
};

/// dim in {1,2}, at least 3 interior nodes per axis; spacing h = 1/(n+1).
Grid build_grid(int dim, const std::vector<int>& n_per_axis);

/// Real values on the interior nodes of a grid. The boundary is identically zero.
class GridFunction {
 public:
  GridFunction() = default;
  explicit GridFunction(const Grid& grid, double fill = 0.0)
      : grid_(grid), v_(grid.num_nodes(), fill) {}
  GridFunction(const Grid& grid, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return v_.size(); }

  double& operator[](std::size_t i) { return v_[i]; }
  double operator[](std::size_t i) const { return v_[i]; }
  double& at(int i, int j) { return v_[grid_.index(i, j)]; }
  double at(int i, int j) const { return v_[grid_.index(i, j)]; }

  const std::vector<double>& values() const { return v_; }
  std::vector<double>& values() { return v_; }

  // Throws IntegrityError if any entry is not finite.
  void check_finite(const char* what) const;

 private:
  Grid grid_;
  std::vector<double> v_;
};

// Samples a callable f(Point)->double at the interior nodes.
template <typename F>
GridFunction sample(const Grid& grid, F&& f) {
  GridFunction out(grid);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = f(grid.coord(k));
  return out;
}

double norm_sup(const GridFunction& f);
// (sum |f|^q h^dim)^{1/q}, q > 1; composite quadrature with zero boundary.
double norm_Lq(const GridFunction& f, double q);
// Edge-based discrete version of (int |grad f|^p)^{1/p}; see plap.hpp for the
// matching operator. Accepts p >= 2 (p = 2 is the linear cross-check case).
double seminorm_grad_p(const GridFunction& f, double p);

// Discrete L^2(0,1)^dim inner product, sum(a_i b_i) h^dim.
double inner_L2(const GridFunction& a, const GridFunction& b);
inline double norm_L2(const GridFunction& f) { return norm_Lq(f, 2.0); }

}  // namespace plapflow
