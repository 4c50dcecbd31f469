#include "plapflow/nonlinearity.hpp"

#include <cmath>
#include <functional>
#include <limits>

namespace plapflow {

namespace {

double simpson(double lo, double hi, double flo, double fmid, double fhi) {
  return (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
}

double adaptive_simpson_rec(const std::function<double(double)>& f, double lo,
                            double hi, double flo, double fmid, double fhi,
                            double whole, double tol, int depth) {
  const double mid = 0.5 * (lo + hi);
  const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(lo, mid, flo, flm, fmid);
  const double right = simpson(mid, hi, fmid, frm, fhi);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson_rec(f, lo, mid, flo, flm, fmid, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, mid, hi, fmid, frm, fhi, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(double lo, double hi, double tol,
                        const std::function<double(double)>& f) {
  if (lo == hi) return 0.0;
  const double flo = f(lo), fhi = f(hi), fmid = f(0.5 * (lo + hi));
  const double whole = simpson(lo, hi, flo, fmid, fhi);
  return adaptive_simpson_rec(f, lo, hi, flo, fmid, fhi, whole, tol, 48);
}

double gamma_p(double s, double x) {
  if (x <= 0.0) return 0.0;
  if (x < s + 1.0) {
    // series representation
    double term = 1.0 / s, sum = term, ap = s;
    for (int n = 0; n < 500; ++n) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
  }
  // continued fraction for Q(s,x), modified Lentz
  const double tiny = 1e-300;
  double b = x + 1.0 - s, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  const double q = std::exp(-x + s * std::log(x) - std::lgamma(s)) * h;
  return 1.0 - q;
}

Nonlinearity Nonlinearity::one_plus_exp(double a, double b, double c) {
  return Nonlinearity(Family::OnePlusExp, a, b, c, "one_plus_exp");
}

Nonlinearity Nonlinearity::power_decay(double a, double b, double c) {
  return Nonlinearity(Family::PowerDecay, a, b, c, "power_decay");
}

Nonlinearity::Nonlinearity(Family family, double a, double b, double c, std::string name)
    : family_(family), a_(a), b_(b), c_(c), name_(std::move(name)) {
  validate();
}

void Nonlinearity::validate() const {
  if (!(a_ >= 0.0))
    throw ConfigError(name_ + ": parameter a must be >= 0 (g0 > ginf >= 0 fails)");
  if (!(b_ > 0.0) || !(c_ > 0.0))
    throw ConfigError(name_ + ": g not strictly decreasing (need b > 0 and c > 0)");
  // spot-check on a xi lattice: positivity, strict decrease, Lipschitz bound
  const Point origin{};
  const double lk = lipschitz(16.0);
  double prev_xi = 0.0, prev = g(origin, 0.0);
  if (!(prev > 0.0)) throw ConfigError(name_ + ": g(.,0) must be positive");
  for (double xi : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
    const double cur = g(origin, xi);
    if (!(cur > 0.0)) throw ConfigError(name_ + ": g must stay positive");
    if (!(cur < prev)) throw ConfigError(name_ + ": g not strictly decreasing");
    if (std::abs(cur - prev) > lk * (xi - prev_xi) + 1e-12)
      throw ConfigError(name_ + ": Lipschitz bound violated on sample lattice");
    prev = cur;
    prev_xi = xi;
  }
  if (!(ginf(origin) < g0(origin)))
    throw ConfigError(name_ + ": need ginf < g0 pointwise");
}

double Nonlinearity::g(const Point&, double xi) const {
  const double s = xi < 0.0 ? 0.0 : xi;  // extension g(x,-xi) = g(x,0)
  switch (family_) {
    case Family::OnePlusExp:
      return a_ + b_ * std::exp(-c_ * s);
    case Family::PowerDecay:
      return a_ + b_ * std::pow(1.0 + s, -c_);
  }
  return 0.0;
}

double Nonlinearity::dg_dxi(const Point&, double xi) const {
  if (xi < 0.0) return 0.0;
  switch (family_) {
    case Family::OnePlusExp:
      return -b_ * c_ * std::exp(-c_ * xi);
    case Family::PowerDecay:
      return -b_ * c_ * std::pow(1.0 + xi, -c_ - 1.0);
  }
  return 0.0;
}

double Nonlinearity::g0(const Point&) const { return a_ + b_; }

double Nonlinearity::ginf(const Point&) const { return a_; }

double Nonlinearity::lipschitz(double) const { return b_ * c_; }

bool Nonlinearity::has_closed_F() const { return family_ == Family::OnePlusExp; }

double Nonlinearity::F(const Point& x, double xi, double p) const {
  if (!(xi >= 0.0)) throw ConfigError("Nonlinearity::F: xi must be nonnegative");
  if (xi == 0.0) return 0.0;
  if (family_ == Family::OnePlusExp) {
    // int_0^xi e^{-cs} s^{p-1} ds = c^{-p} gamma(p, c xi)
    const double tail = gamma_p(p, c_ * xi) * std::exp(std::lgamma(p) - p * std::log(c_));
    return a_ * std::pow(xi, p) / p + b_ * tail;
  }
  const Point xc = x;
  return adaptive_simpson(0.0, xi, 1e-8,
                          [&](double s) { return g(xc, s) * std::pow(s, p - 1.0); });
}

}  // namespace plapflow
