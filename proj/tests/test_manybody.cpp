#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>

#include "csgas/bethe.hpp"
#include "csgas/manybody.hpp"
#include "doctest.h"

using namespace csgas;

TEST_CASE("fermi occupation basics") {
  ThermalState s{1.0, 1.0};
  CHECK(fermi_n(s, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(fermi_n(s, 0.0) == doctest::Approx(1.0 / (1.0 + std::exp(-1.0)))
                               .epsilon(1e-14));
  CHECK(fermi_n(s, 50.0) == 0.0);
}

TEST_CASE("occupation moments: cold closed forms and a Simpson oracle") {
  ThermalState cold{1e-5, 1.0};
  CHECK(moment_A(cold, 0) == doctest::Approx(1.0 / M_PI).epsilon(1e-4));
  CHECK(moment_A(cold, 2) ==
        doctest::Approx(1.0 / (3.0 * M_PI)).epsilon(1e-4));

  ThermalState s{1.0, 1.0};
  // Simpson on [-12, 12], fine enough that its own error is < 1e-10
  auto f = [&](double p) { return p * p * fermi_n(s, p) / (2.0 * M_PI); };
  int n = 4000;
  double h = 24.0 / n, acc = f(-12.0) + f(12.0);
  for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(-12.0 + i * h);
  CHECK(moment_A(s, 2) == doctest::Approx(acc * h / 3.0).epsilon(1e-9));
  CHECK_THROWS_AS(moment_A(s, 1), ConfigError);
}

TEST_CASE("square root with the cut along the positive real axis") {
  CHECK(std::abs(sqrt_pos_cut({-4.0, 0.0}) - cdouble(0.0, 2.0)) < 1e-14);
  CHECK(std::abs(sqrt_pos_cut({0.0, 2.0}) - cdouble(1.0, 1.0)) < 1e-14);
  CHECK(std::abs(sqrt_pos_cut({0.0, -2.0}) - cdouble(-1.0, 1.0)) < 1e-14);
  CHECK(std::abs(sqrt_pos_cut({4.0, 0.0}) - cdouble(2.0, 0.0)) < 1e-14);
  for (double re : {-3.0, -1.0, 0.5, 2.0})
    for (double im : {-1.0, -1e-3, 0.0, 1e-3, 1.0})
      CHECK(sqrt_pos_cut({re, im}).imag() >= 0.0);
}

TEST_CASE("first-order self-energy: moment form equals direct quadrature") {
  ThermalState s{1.0, 1.0};
  for (double k : {0.0, 0.7, 2.0})
    CHECK(self_energy_first_order(s, 0.4, k) ==
          doctest::Approx(self_energy_first_order_direct(s, 0.4, k))
              .epsilon(1e-9));
}

TEST_CASE("self-energy symmetries and guards") {
  ThermalState s{1.0, 1.0};
  QuadratureConfig q;
  q.rel_tol = 1e-7;
  cdouble z(0.7, 0.3);
  CHECK(std::abs(self_energy(z, 0.0, s, 0.0, q)) == 0.0);
  cdouble sp = self_energy(z, 0.8, s, 0.5, q);
  cdouble sm = self_energy(z, -0.8, s, 0.5, q);
  CHECK(std::abs(sp - sm) < 1e-7 * std::abs(sp));
  cdouble sc = self_energy(std::conj(z), 0.8, s, 0.5, q);
  CHECK(std::abs(sc - std::conj(sp)) < 1e-12);
  CHECK(sp.imag() < 0.0);  // retarded-side damping
  CHECK_THROWS_AS(self_energy(cdouble(1.0, 0.0), 0.0, s, 0.5, q), ConfigError);
  CHECK_THROWS_AS(self_energy(cdouble(1.0, 1e-5), 0.0, s, 0.5, q),
                  EtaTooSmall);
}

TEST_CASE("eta -> 0 limit matches the finite-eta Richardson extrapolation") {
  ThermalState s{1.0, 1.0};
  QuadratureConfig q;
  q.rel_tol = 1e-8;
  for (double om : {-0.5, 1.0})
    for (double k : {0.0, 1.0}) {
      cdouble exact = self_energy_retarded(om, k, s, 0.5, q);
      cdouble s1 = self_energy(cdouble(om, 0.02), k, s, 0.5, q);
      cdouble s2 = self_energy(cdouble(om, 0.04), k, s, 0.5, q);
      cdouble extrap = 2.0 * s1 - s2;  // cancels the O(eta) drift
      CHECK(std::abs(extrap - exact) < 2e-3 * std::max(1.0, std::abs(exact)));
    }
}

TEST_CASE("lattice vertex: conservation, exchange symmetry, Pauli zero") {
  VertexParams v{100.0, 0.02, 0.5, tanh_regulator(), 0, 1};
  double dk = 2.0 * M_PI / 100.0;
  CHECK(vertex_W(v, dk, 2 * dk, 3 * dk, dk) == 0.0);  // not conserving
  double w1 = vertex_W(v, 5 * dk, 2 * dk, 3 * dk, 4 * dk);
  double w2 = vertex_W(v, 4 * dk, 3 * dk, 2 * dk, 5 * dk);
  CHECK(w1 == doctest::Approx(w2).epsilon(1e-12));
  CHECK(vertex_W(v, 2 * dk, 2 * dk, 3 * dk, dk) == doctest::Approx(0.0));
  // W(p,q,q,p) reduces to the single transform difference over 2L
  double w3 = vertex_W(v, 5 * dk, 2 * dk, 2 * dk, 5 * dk);
  VertexParams v2 = v;
  v2.order = 2;
  CHECK(std::abs(vertex_W(v2, 5 * dk, 2 * dk, 2 * dk, 5 * dk) - w3) > 0.0);
}

TEST_CASE("finite-ring self-energy approaches the continuum answer") {
  ThermalState s{1.0, 1.0};
  const double beta = 0.5, T = 1.0;
  QuadratureConfig q;
  q.rel_tol = 1e-8;
  VertexParams v{100.0, 0.02, beta, tanh_regulator(), 0, 2};
  cdouble lattice = self_energy_finite_L(0, 0, v, s);
  cdouble cont = self_energy(cdouble(0.0, M_PI * T), 0.0, s, beta, q);
  CHECK(std::abs(lattice - cont) < 0.06 * std::abs(cont));
  CHECK_THROWS_AS(([&] {
                    VertexParams bad = v;
                    bad.cutoff = 10;
                    self_energy_finite_L(0, 0, bad, s);
                  }()),
                  CutoffTooSmall);
}

TEST_CASE("free spectral function is the eta Lorentzian") {
  ThermalState s{1.0, 1.0};
  QuadratureConfig q;
  q.eta = 0.05;
  double om = 0.4, k = 0.9;
  double xi = k * k - s.mu;
  double expect = 2.0 * q.eta / (std::pow(om - xi, 2) + q.eta * q.eta);
  CHECK(spectral(om, k, s, 0.0, q) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(std::abs(sum_rule(k, s, 0.0, q) - 1.0) < 2e-3);
}

TEST_CASE("spectral grid agrees with pointwise evaluation") {
  ThermalState s{1.0, 1.0};
  QuadratureConfig q;
  q.rel_tol = 1e-6;
  q.eta = 0.1;
  Eigen::VectorXd oms(3), ks(2);
  oms << -1.0, 0.0, 2.0;
  ks << 0.0, 1.0;
  auto g = spectral_grid(oms, ks, s, 0.5, q);
  CHECK(g.a_vals.rows() == 3);
  CHECK(g.a_vals.cols() == 2);
  for (int i : {0, 2})
    for (int j : {0, 1}) {
      CHECK(g.a_vals(i, j) ==
            doctest::Approx(spectral(oms[i], ks[j], s, 0.5, q)).epsilon(1e-6));
      CHECK(g.a_vals(i, j) >= 0.0);
    }
}

TEST_CASE("interacting sum rule stays near one") {
  ThermalState s{1.0, 1.0};
  QuadratureConfig q;
  q.rel_tol = 1e-6;
  q.eta = 0.05;
  CHECK(std::abs(sum_rule(0.0, s, 0.5, q) - 1.0) < 1e-2);
}

TEST_CASE("internal energy: free gas is exact") {
  ThermalState s{1.0, 1.0};
  QuadratureConfig q;
  q.rel_tol = 1e-9;
  // Simpson oracle for int dk/2pi k^2 n(k)
  auto f = [&](double k) { return k * k * fermi_n(s, k) / (2.0 * M_PI); };
  int n = 4000;
  double h = 24.0 / n, acc = f(-12.0) + f(12.0);
  for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(-12.0 + i * h);
  CHECK(internal_energy(s, 0.0, q) ==
        doctest::Approx(acc * h / 3.0).epsilon(1e-7));
}

TEST_CASE("internal energy closes on yang-yang at strong coupling") {
  ThermalState s{1.0, 1.0};
  QuadratureConfig q;
  q.rel_tol = 1e-7;
  double c = 20.0;
  double u = internal_energy(s, 2.0 / c, q);
  double e_yy = yang_yang_solve(s, c).energy_density;
  CHECK(std::abs(u - e_yy) < 2e-3);
}
