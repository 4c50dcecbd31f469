#include <doctest.h>

#include <cmath>
#include <limits>

#include "helpers.hpp"
#include "oracles.hpp"
#include "plapflow/spectral.hpp"

using namespace plapflow;
namespace tu = testutil;

namespace {
const double kPi = std::acos(-1.0);
using testutil::shooting_eigenvalue;
}  // namespace

TEST_CASE("shooting oracle matches the closed form") {
  for (double p : {2.0, 2.5, 3.0, 4.0}) {
    const double shot = shooting_eigenvalue(p);
    const double closed = tu::plap_eigenvalue_1d(p);
    CHECK(shot == doctest::Approx(closed).epsilon(1e-5));
  }
}

TEST_CASE("principal eigenvalue, 1d") {
  SolverControls sc;

  SUBCASE("p = 2 linear cross-check") {
    Grid g = build_grid(1, {255});
    EigenResult eig = principal_eigenvalue(unit_weight(g), 2.0, sc);
    CHECK(eig.mu0 == doctest::Approx(kPi * kPi).epsilon(0.005));
    CHECK(norm_sup(eig.psi0) == doctest::Approx(1.0));
    for (std::size_t k = 0; k < eig.psi0.size(); ++k) CHECK(eig.psi0[k] > 0.0);
  }

  SUBCASE("p = 3 against the shooting oracle") {
    Grid g = build_grid(1, {511});
    EigenResult eig = principal_eigenvalue(unit_weight(g), 3.0, sc);
    CHECK(eig.mu0 == doctest::Approx(shooting_eigenvalue(3.0)).epsilon(0.01));
    CHECK(eig.residual <= 1e-9);
  }

  SUBCASE("weight doubling halves mu0, same eigenfunction") {
    Grid g = build_grid(1, {127});
    EigenResult one = principal_eigenvalue(unit_weight(g), 3.0, sc);
    EigenResult two = principal_eigenvalue(Weight(GridFunction(g, 2.0)), 3.0, sc);
    CHECK(two.mu0 == doctest::Approx(0.5 * one.mu0).epsilon(1e-8));
    CHECK(tu::sup_distance(one.psi0, two.psi0) < 1e-7);
  }
}

TEST_CASE("rayleigh quotient properties") {
  std::mt19937_64 rng(3);
  Grid g = build_grid(1, {127});
  Weight rho = unit_weight(g);
  GridFunction w = tu::random_function(g, rng, 0.1, 1.0);

  GridFunction w2 = w;
  for (std::size_t k = 0; k < w2.size(); ++k) w2[k] *= -3.7;
  CHECK(rayleigh_quotient(w2, rho, 3.0) ==
        doctest::Approx(rayleigh_quotient(w, rho, 3.0)).epsilon(1e-12));

  Weight rho3(GridFunction(g, 3.0));
  CHECK(rayleigh_quotient(w, rho3, 3.0) ==
        doctest::Approx(rayleigh_quotient(w, rho, 3.0) / 3.0).epsilon(1e-12));

  SolverControls sc;
  EigenResult eig = principal_eigenvalue(rho, 3.0, sc);
  CHECK(rayleigh_quotient(eig.psi0, rho, 3.0) == doctest::Approx(eig.mu0));

  CHECK_THROWS_AS(rayleigh_quotient(GridFunction(g), rho, 3.0), ConfigError);
}

TEST_CASE("discrete Poincare inequality") {
  std::mt19937_64 rng(17);
  SolverControls sc;
  Grid g = build_grid(1, {127});
  for (double p : {2.5, 3.0}) {
    EigenResult eig = principal_eigenvalue(unit_weight(g), p, sc);
    for (int trial = 0; trial < 200; ++trial) {
      GridFunction w = tu::random_function(g, rng);
      CHECK(rayleigh_quotient(w, unit_weight(g), p) >= eig.mu0 - 1e-6);
    }
  }
}

TEST_CASE("weight monotonicity and continuity in the weight") {
  SolverControls sc;
  Grid g = build_grid(1, {127});
  const double p = 3.0;

  SUBCASE("rho1 <= rho2 with strict inequality somewhere") {
    GridFunction bigger(g, 1.0);
    for (std::size_t k = 0; k < bigger.size(); ++k)
      if (g.coord(k).x > 0.5) bigger[k] = 2.0;
    EigenResult m1 = principal_eigenvalue(unit_weight(g), p, sc);
    EigenResult m2 = principal_eigenvalue(Weight(bigger), p, sc);
    CHECK(m1.mu0 > m2.mu0 + 100.0 * (m1.residual + m2.residual + 1e-12));
  }

  SUBCASE("mu0(g_delta) decreases to mu0(g0) as delta -> 0") {
    Nonlinearity gnl = Nonlinearity::one_plus_exp(1.0, 1.0, 1.0);
    const double base = principal_eigenvalue(weight_g0(gnl, g), p, sc).mu0;
    double prev = std::numeric_limits<double>::infinity();
    for (double delta : {1.0, 0.1, 0.01, 0.001}) {
      const double mu = principal_eigenvalue(weight_from_g(gnl, g, delta), p, sc).mu0;
      CHECK(mu > base);
      CHECK(mu < prev);
      prev = mu;
    }
    CHECK(prev == doctest::Approx(base).epsilon(0.01));
  }
}

TEST_CASE("mesh convergence of mu0") {
  SolverControls sc;
  double mu[3];
  const int ns[3] = {127, 255, 511};
  for (int i = 0; i < 3; ++i)
    mu[i] = principal_eigenvalue(unit_weight(build_grid(1, {ns[i]})), 3.0, sc).mu0;
  const double ratio = (mu[0] - mu[1]) / (mu[1] - mu[2]);
  CHECK(ratio > 1.5);
  CHECK(ratio < 5.0);
  CHECK(mu[2] == doctest::Approx(tu::plap_eigenvalue_1d(3.0)).epsilon(1e-3));
}

TEST_CASE("thresholds") {
  SolverControls sc;
  Grid g = build_grid(1, {127});

  SUBCASE("vanishing ginf gives infinite lambda_max") {
    Nonlinearity decay = Nonlinearity::one_plus_exp(0.0, 1.0, 1.0);  // e^{-xi}
    Thresholds th = thresholds(decay, 3.0, g, sc);
    CHECK(!th.lambda_max_finite());
    CHECK(th.lambda_min > 0.0);
  }

  SUBCASE("baseline family: (mu0/2, mu0) by weight scaling") {
    Nonlinearity gnl = Nonlinearity::one_plus_exp(1.0, 1.0, 1.0);
    ThresholdsResult tr = compute_thresholds(gnl, 3.0, g, sc);
    const double mu_unit = principal_eigenvalue(unit_weight(g), 3.0, sc).mu0;
    CHECK(tr.thresholds.lambda_min == doctest::Approx(0.5 * mu_unit).epsilon(1e-8));
    CHECK(tr.thresholds.lambda_max == doctest::Approx(mu_unit).epsilon(1e-8));
    CHECK(tr.thresholds.lambda_min < tr.thresholds.lambda_max);
    CHECK(tr.mode_max.has_value());
  }
}

TEST_CASE("2d eigenvalue cross-check at p = 2") {
  SolverControls sc;
  Grid g = build_grid(2, {31, 31});
  EigenResult eig = principal_eigenvalue(unit_weight(g), 2.0, sc);
  CHECK(eig.mu0 == doctest::Approx(2.0 * kPi * kPi).epsilon(0.02));
  for (std::size_t k = 0; k < eig.psi0.size(); ++k) CHECK(eig.psi0[k] > 0.0);
}

TEST_CASE("weight validation") {
  Grid g = build_grid(1, {7});
  CHECK_THROWS_AS(Weight(GridFunction(g, -1.0)), ConfigError);
  CHECK_THROWS_AS(Weight(GridFunction(g, 0.0)), ConfigError);
  GridFunction sparse(g);
  sparse[3] = 1.0;
  CHECK_NOTHROW((void)Weight{sparse});
}
