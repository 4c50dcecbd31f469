#include "plapflow/plap.hpp"

#include <algorithm>
#include <cmath>

#include "plapflow/detail/stencil.hpp"

namespace plapflow {

namespace {

// Tolerated nodewise undershoot before a "f >= 0" precondition counts as
// violated; solver-level noise on positive trajectories stays below this.
double negativity_floor(const GridFunction& f) {
  return -1e-6 * std::max(1.0, norm_sup(f));
}

double clamp_nonneg(double x, double floor_, const char* what) {
  if (x >= 0.0) return x;
  if (x < floor_) throw ConfigError(std::string(what) + ": negative entries");
  return 0.0;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

}  // namespace

void SolverControls::validate() const {
  if (!(tol_residual > 0.0)) throw ConfigError("SolverControls: tol_residual must be > 0");
  if (max_iter <= 0) throw ConfigError("SolverControls: max_iter must be positive");
  if (!(damping > 0.0 && damping <= 1.0))
    throw ConfigError("SolverControls: damping must lie in (0,1]");
  if (!(eps_jacobian >= 0.0)) throw ConfigError("SolverControls: eps_jacobian must be >= 0");
}

double phi_p(double s, double p) {
  if (s == 0.0) return 0.0;
  const double m = std::pow(std::abs(s), p - 1.0);
  return s > 0.0 ? m : -m;
}

GridFunction apply_p_laplacian(const GridFunction& f, double p) {
  if (!(p >= 2.0)) throw ConfigError("apply_p_laplacian: p must be at least 2");
  const Grid& g = f.grid();
  GridFunction out(g);
  if (g.dim() == 1) {
    const int n = g.n(0);
    const double h = g.h(0);
    std::vector<double> flux(static_cast<std::size_t>(n) + 1);
    detail::for_each_edge_1d(f.values().data(), n, h,
                             [&](int e, double dn) { flux[static_cast<std::size_t>(e)] = phi_p(dn, p); });
    for (int j = 0; j < n; ++j)
      out[static_cast<std::size_t>(j)] =
          (flux[static_cast<std::size_t>(j) + 1] - flux[static_cast<std::size_t>(j)]) / h;
    return out;
  }
  const int nx = g.n(0), ny = g.n(1);
  const double hx = g.h(0), hy = g.h(1);
  auto* v = out.values().data();
  const auto add = [&](int i, int j, double val) {
    if (i >= 0 && i < nx && j >= 0 && j < ny) v[static_cast<std::size_t>(j) * nx + i] += val;
  };
  const double ex = p / 2.0 - 1.0;
  detail::for_each_edge_2d(
      f.values().data(), nx, ny, g.h(0), g.h(1),
      [&](int e, int j, double dn, double t) {
        const double m = detail::edge_weight_2d(j, ny) * std::pow(dn * dn + t * t, ex);
        const double qn = m * dn / hx, qt = m * t / (4.0 * hy);
        add(e, j, -qn);
        add(e - 1, j, qn);
        for (int k : {e - 1, e}) {
          add(k, j + 1, -qt);
          add(k, j - 1, qt);
        }
      },
      [&](int i, int e, double dn, double t) {
        const double m = detail::edge_weight_2d(i, nx) * std::pow(dn * dn + t * t, ex);
        const double qn = m * dn / hy, qt = m * t / (4.0 * hx);
        add(i, e, -qn);
        add(i, e - 1, qn);
        for (int k : {e - 1, e}) {
          add(i + 1, k, -qt);
          add(i - 1, k, qt);
        }
      });
  return out;
}

PLapLinearization::PLapLinearization(const GridFunction& u, double p, double eps_jacobian)
    : grid_(u.grid()), p_(p) {
  const double e2 = eps_jacobian * eps_jacobian;
  diag_.assign(grid_.num_nodes(), 0.0);
  if (grid_.dim() == 1) {
    const int n = grid_.n(0);
    const double h = grid_.h(0), inv_h2 = 1.0 / (h * h);
    w1d_.assign(static_cast<std::size_t>(n) + 1, 0.0);
    detail::for_each_edge_1d(u.values().data(), n, h, [&](int e, double dn) {
      w1d_[static_cast<std::size_t>(e)] = (p - 1.0) * std::pow(dn * dn + e2, p / 2.0 - 1.0);
    });
    for (int j = 0; j < n; ++j)
      diag_[static_cast<std::size_t>(j)] =
          (w1d_[static_cast<std::size_t>(j)] + w1d_[static_cast<std::size_t>(j) + 1]) * inv_h2;
    return;
  }
  const int nx = grid_.n(0), ny = grid_.n(1);
  const double hx = grid_.h(0), hy = grid_.h(1);
  ex_.resize(static_cast<std::size_t>(nx + 1) * ny);
  ey_.resize(static_cast<std::size_t>(nx) * (ny + 1));
  const double exn = p / 2.0 - 1.0, exc = p / 2.0 - 2.0;
  const auto bump = [&](int i, int j, double val) {
    if (i >= 0 && i < nx && j >= 0 && j < ny) diag_[static_cast<std::size_t>(j) * nx + i] += val;
  };
  detail::for_each_edge_2d(
      u.values().data(), nx, ny, hx, hy,
      [&](int e, int j, double dn, double t) {
        const double w = detail::edge_weight_2d(j, ny);
        const double s = dn * dn + t * t + e2;
        EdgeCoef c{w * std::pow(s, exn), w * (p - 2.0) * std::pow(s, exc), dn, t};
        ex_[static_cast<std::size_t>(j) * (nx + 1) + e] = c;
        const double dn_diag = (c.m0 + c.mc * dn * dn) / (hx * hx);
        const double t_diag = (c.m0 + c.mc * t * t) / (16.0 * hy * hy);
        bump(e, j, dn_diag);
        bump(e - 1, j, dn_diag);
        for (int k : {e - 1, e}) {
          bump(k, j + 1, t_diag);
          bump(k, j - 1, t_diag);
        }
      },
      [&](int i, int e, double dn, double t) {
        const double w = detail::edge_weight_2d(i, nx);
        const double s = dn * dn + t * t + e2;
        EdgeCoef c{w * std::pow(s, exn), w * (p - 2.0) * std::pow(s, exc), dn, t};
        ey_[static_cast<std::size_t>(e) * nx + i] = c;
        const double dn_diag = (c.m0 + c.mc * dn * dn) / (hy * hy);
        const double t_diag = (c.m0 + c.mc * t * t) / (16.0 * hx * hx);
        bump(i, e, dn_diag);
        bump(i, e - 1, dn_diag);
        for (int k : {e - 1, e}) {
          bump(i + 1, k, t_diag);
          bump(i - 1, k, t_diag);
        }
      });
}

void PLapLinearization::apply(const std::vector<double>& z, std::vector<double>& y) const {
  y.assign(z.size(), 0.0);
  if (grid_.dim() == 1) {
    const int n = grid_.n(0);
    const double h = grid_.h(0);
    const detail::Pad1 zz{z.data(), n};
    double flux_prev = w1d_[0] * (zz(0) - 0.0) / h;
    for (int j = 0; j < n; ++j) {
      const double flux_next = w1d_[static_cast<std::size_t>(j) + 1] * (zz(j + 1) - zz(j)) / h;
      y[static_cast<std::size_t>(j)] = (flux_prev - flux_next) / h;
      flux_prev = flux_next;
    }
    return;
  }
  const int nx = grid_.n(0), ny = grid_.n(1);
  const double hx = grid_.h(0), hy = grid_.h(1);
  const auto add = [&](int i, int j, double val) {
    if (i >= 0 && i < nx && j >= 0 && j < ny) y[static_cast<std::size_t>(j) * nx + i] += val;
  };
  detail::for_each_edge_2d(
      z.data(), nx, ny, hx, hy,
      [&](int e, int j, double dnz, double tz) {
        const EdgeCoef& c = ex_[static_cast<std::size_t>(j) * (nx + 1) + e];
        const double dotv = c.dn * dnz + c.t * tz;
        const double qn = (c.m0 * dnz + c.mc * c.dn * dotv) / hx;
        const double qt = (c.m0 * tz + c.mc * c.t * dotv) / (4.0 * hy);
        add(e, j, qn);
        add(e - 1, j, -qn);
        for (int k : {e - 1, e}) {
          add(k, j + 1, qt);
          add(k, j - 1, -qt);
        }
      },
      [&](int i, int e, double dnz, double tz) {
        const EdgeCoef& c = ey_[static_cast<std::size_t>(e) * nx + i];
        const double dotv = c.dn * dnz + c.t * tz;
        const double qn = (c.m0 * dnz + c.mc * c.dn * dotv) / hy;
        const double qt = (c.m0 * tz + c.mc * c.t * dotv) / (4.0 * hx);
        add(i, e, qn);
        add(i, e - 1, -qn);
        for (int k : {e - 1, e}) {
          add(i + 1, k, qt);
          add(i - 1, k, -qt);
        }
      });
}

bool PLapLinearization::solve(double alpha, const std::vector<double>& extra,
                              const std::vector<double>& b, std::vector<double>& x,
                              double rel_tol) const {
  const std::size_t n = b.size();
  if (grid_.dim() == 1) {
    // Thomas algorithm on alpha I + H + diag(extra)
    const double h = grid_.h(0), inv_h2 = 1.0 / (h * h);
    std::vector<double> d(n), rhs(b), off(n - 1);
    for (std::size_t j = 0; j < n; ++j)
      d[j] = alpha + diag_[j] + (extra.empty() ? 0.0 : extra[j]);
    for (std::size_t j = 0; j + 1 < n; ++j) off[j] = -w1d_[j + 1] * inv_h2;
    for (std::size_t j = 1; j < n; ++j) {
      if (std::abs(d[j - 1]) < 1e-300) return false;
      const double m = off[j - 1] / d[j - 1];
      d[j] -= m * off[j - 1];
      rhs[j] -= m * rhs[j - 1];
    }
    if (std::abs(d[n - 1]) < 1e-300) return false;
    x.assign(n, 0.0);
    x[n - 1] = rhs[n - 1] / d[n - 1];
    for (std::size_t j = n - 1; j-- > 0;) x[j] = (rhs[j] - off[j] * x[j + 1]) / d[j];
    return true;
  }
  // Jacobi-preconditioned CG
  x.assign(n, 0.0);
  std::vector<double> r(b), z(n), q(n), hp(n);
  std::vector<double> prec(n);
  for (std::size_t k = 0; k < n; ++k) {
    double pk = alpha + diag_[k] + (extra.empty() ? 0.0 : extra[k]);
    prec[k] = pk > 1e-300 ? 1.0 / pk : 1.0;
  }
  const double bnorm = std::sqrt(dot(b, b));
  if (bnorm == 0.0) return true;
  for (std::size_t k = 0; k < n; ++k) z[k] = prec[k] * r[k];
  std::vector<double> pdir(z);
  double rz = dot(r, z);
  const int max_cg = static_cast<int>(8 * n) + 200;
  for (int it = 0; it < max_cg; ++it) {
    apply(pdir, hp);
    for (std::size_t k = 0; k < n; ++k)
      q[k] = alpha * pdir[k] + hp[k] + (extra.empty() ? 0.0 : extra[k] * pdir[k]);
    const double pq = dot(pdir, q);
    if (!(pq > 0.0)) return false;  // indefinite system
    const double step = rz / pq;
    for (std::size_t k = 0; k < n; ++k) {
      x[k] += step * pdir[k];
      r[k] -= step * q[k];
    }
    if (std::sqrt(dot(r, r)) <= rel_tol * bnorm) return true;
    for (std::size_t k = 0; k < n; ++k) z[k] = prec[k] * r[k];
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t k = 0; k < n; ++k) pdir[k] = z[k] + beta * pdir[k];
  }
  return false;
}

namespace {

double convex_objective(const GridFunction& u, const GridFunction& rhs, double p) {
  const double s = seminorm_grad_p(u, p);
  return std::pow(s, p) / p - inner_L2(rhs, u);
}

}  // namespace

GridFunction solve_p_poisson(const GridFunction& rhs, double p,
                             const SolverControls& controls, const GridFunction* init) {
  if (!(p >= 2.0)) throw ConfigError("solve_p_poisson: p must be at least 2");
  controls.validate();
  const Grid& grid = rhs.grid();
  const std::size_t n = grid.num_nodes();
  const double rhs_norm = norm_L2(rhs);
  if (rhs_norm == 0.0) return GridFunction(grid);

  GridFunction u(grid);
  if (init != nullptr) {
    u = *init;
  } else {
    // linear Poisson solve, then the exact optimal scaling of that profile
    PLapLinearization lap(GridFunction(grid), 2.0, 0.0);
    std::vector<double> ulin;
    if (lap.solve(0.0, {}, rhs.values(), ulin, 1e-10)) {
      GridFunction ul(grid, std::move(ulin));
      const double s = seminorm_grad_p(ul, p);
      const double ip = inner_L2(rhs, ul);
      if (s > 0.0 && ip != 0.0) {
        const double c = (ip > 0.0 ? 1.0 : -1.0) *
                         std::pow(std::abs(ip) / std::pow(s, p), 1.0 / (p - 1.0));
        for (std::size_t k = 0; k < n; ++k) ul[k] *= c;
        u = ul;
      }
    }
  }

  double obj = convex_objective(u, rhs, p);
  int stalls = 0, no_progress = 0;
  double res_norm = 0.0, best_res = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < controls.max_iter; ++iter) {
    GridFunction r = apply_p_laplacian(u, p);
    double au_norm = norm_L2(r);
    for (std::size_t k = 0; k < n; ++k) r[k] += rhs[k];
    res_norm = norm_L2(r);
    const double res_scale = rhs_norm + au_norm;
    const double tol_eff = std::max(controls.tol_residual, 5e-14 * res_scale);
    if (res_norm <= tol_eff) return u;

    // eps_jacobian caps the regularization; once the residual is small the
    // Jacobian is sharpened toward the exact degenerate Hessian so the
    // endgame stays superlinear for 2 < p < 3
    double eps_eff = controls.eps_jacobian;
    const double rel = res_norm / (res_scale + 1e-300);
    if (rel < 1e-6) eps_eff = std::min(eps_eff, rel);
    PLapLinearization lin(u, p, eps_eff);
    const double cell = grid.cell_measure();
    std::vector<double> d;
    bool have_newton = lin.solve(0.0, {}, r.values(), d, grid.dim() == 1 ? 1e-12 : 1e-6);
    double slope = 0.0;
    if (have_newton) {
      slope = -cell * dot(r.values(), d);
      if (!(slope < 0.0)) have_newton = false;
    }
    if (!have_newton || stalls >= 2) {
      // preconditioned gradient descent fallback
      d.assign(n, 0.0);
      const auto& dg = lin.diagonal();
      for (std::size_t k = 0; k < n; ++k) d[k] = r[k] / std::max(dg[k], 1e-300);
      slope = -cell * dot(r.values(), d);
    }

    // stagnation at machine precision: no representable step can improve u,
    // or the residual has stopped shrinking altogether
    if (res_norm < 0.9 * best_res) {
      best_res = std::min(best_res, res_norm);
      no_progress = 0;
    } else {
      ++no_progress;
    }
    double dmax = 0.0, umax = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      dmax = std::max(dmax, std::abs(d[k]));
      umax = std::max(umax, std::abs(u[k]));
    }
    if (dmax <= 8e-16 * umax || no_progress >= 15) {
      if (res_norm <= 1e-7 * res_scale) return u;
      throw SolverError("solve_p_poisson: stagnated at machine precision", res_norm);
    }

    // far from the solution: Armijo on the convex objective. In the endgame
    // the objective is flat to rounding, so backtrack on the residual norm
    // instead (it keeps full relative precision near zero).
    const bool endgame = rel < 1e-6;
    double t = 1.0;
    bool accepted = false;
    GridFunction trial(grid);
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t k = 0; k < n; ++k) trial[k] = u[k] + t * d[k];
      bool ok;
      if (endgame) {
        GridFunction rt = apply_p_laplacian(trial, p);
        for (std::size_t k = 0; k < n; ++k) rt[k] += rhs[k];
        ok = norm_L2(rt) <= (1.0 - 1e-4 * t) * res_norm;
      } else {
        ok = convex_objective(trial, rhs, p) <= obj + 0.1 * t * slope;
      }
      if (ok) {
        u = trial;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (accepted) obj = convex_objective(u, rhs, p);
    stalls = accepted && t >= 1e-8 ? 0 : stalls + 1;
    if (stalls > 25) {
      if (res_norm <= 1e-7 * res_scale) return u;
      throw SolverError("solve_p_poisson: line search stalled", res_norm);
    }
  }
  throw SolverError("solve_p_poisson: no convergence within max_iter", res_norm);
}

GridFunction big_F(const Nonlinearity& g, const GridFunction& f, double p) {
  if (!(p >= 2.0)) throw ConfigError("big_F: p must be at least 2");
  const double floor_ = negativity_floor(f);
  GridFunction out(f.grid());
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double xi = clamp_nonneg(f[k], floor_, "big_F");
    out[k] = g.F(f.grid().coord(k), xi, p);
  }
  return out;
}

double energy(const GridFunction& f, double lambda, const Nonlinearity& g, double p) {
  if (!(lambda > 0.0)) throw ConfigError("energy: lambda must be positive");
  const GridFunction ff = big_F(g, f, p);
  double s = 0.0;
  for (std::size_t k = 0; k < ff.size(); ++k) s += ff[k];
  return std::pow(seminorm_grad_p(f, p), p) / p - lambda * s * f.grid().cell_measure();
}

ReactionField::ReactionField(const Nonlinearity& g, const Grid& grid, double p)
    : g_(g), p_(p) {
  coords_.resize(grid.num_nodes());
  for (std::size_t k = 0; k < coords_.size(); ++k) coords_[k] = grid.coord(k);
}

ReactionField ReactionField::frozen(const GridFunction& gamma, double p) {
  ReactionField f;
  f.gamma_ = gamma.values();
  f.p_ = p;
  return f;
}

double ReactionField::coeff(std::size_t node, double xi) const {
  return g_ ? g_->g(coords_[node], xi) : gamma_[node];
}

double ReactionField::dcoeff_dxi(std::size_t node, double xi) const {
  return g_ ? g_->dg_dxi(coords_[node], xi) : 0.0;
}

double ReactionField::reaction(std::size_t node, double xi) const {
  return coeff(node, xi) * phi_p(xi, p_);
}

double ReactionField::dreaction_dxi(std::size_t node, double xi) const {
  const double dphi = (p_ - 1.0) * std::pow(std::abs(xi), p_ - 2.0);
  return dcoeff_dxi(node, xi) * phi_p(xi, p_) + coeff(node, xi) * dphi;
}

double ReactionField::antiderivative(std::size_t node, double xi) const {
  if (xi <= 0.0) return 0.0;
  if (g_) return g_->F(coords_[node], xi, p_);
  return gamma_[node] * std::pow(xi, p_) / p_;
}

double energy_with_reaction(const GridFunction& f, double lambda,
                            const ReactionField& field) {
  const double p = field.p();
  const double floor_ = negativity_floor(f);
  double s = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k)
    s += field.antiderivative(k, clamp_nonneg(f[k], floor_, "energy"));
  return std::pow(seminorm_grad_p(f, p), p) / p - lambda * s * f.grid().cell_measure();
}

}  // namespace plapflow
