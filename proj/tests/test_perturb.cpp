#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "csgas/perturb.hpp"
#include "doctest.h"

using namespace csgas;

TEST_CASE("fermi sea macro scalars are exact") {
  auto d = fermi_sea(1.0);
  auto m = macro_scalars(d);
  CHECK(m.density == doctest::Approx(1.0 / M_PI).epsilon(1e-10));
  CHECK(m.energy == doctest::Approx(1.0 / (3.0 * M_PI)).epsilon(1e-10));
  auto d2 = fermi_sea(2.0);
  auto m2 = macro_scalars(d2);
  CHECK(m2.density == doctest::Approx(2.0 / M_PI).epsilon(1e-10));
  CHECK(m2.energy == doctest::Approx(8.0 / (3.0 * M_PI)).epsilon(1e-10));
}

TEST_CASE("cold thermal state approaches the fermi sea") {
  auto cold = macro_scalars(thermal_density(1e-3, 1.0));
  CHECK(cold.density == doctest::Approx(1.0 / M_PI).epsilon(1e-3));
  CHECK(cold.energy == doctest::Approx(1.0 / (3.0 * M_PI)).epsilon(5e-3));
}

TEST_CASE("first order matches its small-beta closed form") {
  // e1 = 2 beta D E [-1 + (beta/2a) c1] + O(a) + O(beta^3)
  const double a = 0.01, beta = 0.01;
  auto d = thermal_density(1.0, 1.0);
  auto m = macro_scalars(d);
  for (const char* name : {"tanh", "erf"}) {
    auto spec = regulator_by_name(name);
    PotentialParams p(a, beta, spec);
    auto e = e_orders(p, d);
    double c1 = sigma1_sq_integral(spec);
    double pred =
        2.0 * beta * m.density * m.energy * (-1.0 + beta / (2.0 * a) * c1);
    CHECK(e.e1 == doctest::Approx(pred).epsilon(3e-2));
  }
}

TEST_CASE("divergence slopes of e1 and e2 match the Parseval pair") {
  const double beta = 0.05;
  auto d = thermal_density(1.0, 1.0);
  auto spec = tanh_regulator();
  QuadratureConfig q;
  q.n_pts = 32;
  auto at = [&](double a) {
    return e_orders(PotentialParams(a, beta, spec), d, q);
  };
  auto lo = at(0.02), hi = at(0.04);
  auto [div1, div2] = divergence_coefficients(
      PotentialParams(0.02, beta, spec), d);
  double slope1 = (lo.e1 - hi.e1) / (1.0 / 0.02 - 1.0 / 0.04);
  double slope2 = (lo.e2 - hi.e2) / (1.0 / 0.02 - 1.0 / 0.04);
  CHECK(slope1 == doctest::Approx(div1).epsilon(5e-2));
  CHECK(slope2 == doctest::Approx(div2).epsilon(5e-2));
  // the pair cancels by Parseval
  CHECK(std::abs(div1 + div2) < 1e-8 * std::abs(div1));
}

TEST_CASE("divergences cancel and the sum approaches the closed form") {
  const double beta = 0.05, a = 0.02;
  auto d = thermal_density(1.0, 1.0);
  QuadratureConfig q;
  q.n_pts = 32;
  auto e = e_orders(PotentialParams(a, beta, tanh_regulator()), d, q);
  auto m = macro_scalars(d);
  // residual is O(a) + O(beta^3); each divergent piece alone is much larger
  double div = beta * beta * m.density * m.energy *
               sigma1_sq_integral(tanh_regulator()) / a;
  CHECK(std::abs(e.cancel_residual) < 4.0 * a * m.energy);
  CHECK(std::abs(e.cancel_residual) < 0.1 * div);
  CHECK(e.e_closed ==
        doctest::Approx((1.0 - 2 * beta * m.density +
                         3 * beta * beta * m.density * m.density) *
                        m.energy)
            .epsilon(1e-12));
}

TEST_CASE("invalid densities are rejected") {
  CHECK_THROWS_AS(thermal_density(0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(fermi_sea(-1.0), ConfigError);
}
