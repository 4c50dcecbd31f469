#pragma once

#include <functional>
#include <string>

#include "plapflow/grid.hpp"

namespace plapflow {

/// Reaction coefficient g(x, xi) > 0, strictly decreasing in xi, with traces
/// g0 = g(.,0) and ginf = lim_{xi->inf} g(.,xi) supplied analytically.
///
/// Two builtin families are available:
///   one_plus_exp:  g(xi) = a + b exp(-c xi)
///   power_decay:   g(xi) = a + b (1 + xi)^{-c}
/// with a >= 0, b > 0, c > 0, so g0 = a + b and ginf = a. For negative xi the
/// coefficient is extended by g(x,-xi) := g(x,0).
class Nonlinearity {
 public:
  static Nonlinearity one_plus_exp(double a, double b, double c);
  static Nonlinearity power_decay(double a, double b, double c);

  double g(const Point& x, double xi) const;
  double dg_dxi(const Point& x, double xi) const;
  double g0(const Point& x) const;
  double ginf(const Point& x) const;
  // Lipschitz bound for g(x,.) on [0,K]; both families attain it at xi = 0.
  double lipschitz(double K) const;

  // F(x, xi) = int_0^xi g(x,s) s^{p-1} ds. Uses the registered closed form
  // when available, adaptive Simpson quadrature (tol 1e-8) otherwise.
  double F(const Point& x, double xi, double p) const;
  bool has_closed_F() const;

  const std::string& name() const { return name_; }
  double param_a() const { return a_; }
  double param_b() const { return b_; }
  double param_c() const { return c_; }

 private:
  enum class Family { OnePlusExp, PowerDecay };

  Nonlinearity(Family family, double a, double b, double c, std::string name);
  void validate() const;

  Family family_;
  double a_, b_, c_;
  std::string name_;
};

// Adaptive Simpson quadrature of a callable on [lo, hi] to absolute tolerance.
double adaptive_simpson(double lo, double hi, double tol,
                        const std::function<double(double)>& f);

// Regularized lower incomplete gamma P(s, x) = gamma(s,x) / Gamma(s).
double gamma_p(double s, double x);

}  // namespace plapflow
