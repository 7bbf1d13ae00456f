#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "csgas/regulator.hpp"
#include "doctest.h"

using namespace csgas;

namespace {

// central finite differences, used as the independent derivative oracle
double fd1(const std::function<double(double)>& f, double x, double h = 1e-5) {
  return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) /
         (12 * h);
}

}  // namespace

TEST_CASE("sigma_eval at distinguished points (tanh)") {
  auto spec = tanh_regulator();
  auto [s0, s1, s2] = sigma_eval(spec, 0.0);
  CHECK(s0 == 0.0);
  CHECK(s1 == 1.0);
  CHECK(s2 == 0.0);
  auto [t0, t1, t2] = sigma_eval(spec, 20.0);
  CHECK(t0 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(t1) < 1e-12);
  CHECK(std::abs(t2) < 1e-12);
  // sigma''(1) = -2 tanh(1) sech^2(1)
  double sech2 = 1.0 - std::tanh(1.0) * std::tanh(1.0);
  CHECK(spec.sigma2(1.0) ==
        doctest::Approx(-2.0 * std::tanh(1.0) * sech2).epsilon(1e-12));
}

TEST_CASE("regulator invariants for both shipped profiles") {
  for (const char* name : {"tanh", "erf"}) {
    auto spec = regulator_by_name(name);
    CAPTURE(name);
    for (double x : {0.1, 0.7, 1.5, 3.0, 6.0}) {
      CHECK(spec.sigma(-x) == doctest::Approx(-spec.sigma(x)).epsilon(1e-14));
      CHECK(spec.sigma1(x) >= 0.0);
      // derivatives agree with finite differences of the level below
      CHECK(spec.sigma1(x) == doctest::Approx(fd1(spec.sigma, x)).epsilon(1e-8));
      CHECK(spec.sigma2(x) ==
            doctest::Approx(fd1(spec.sigma1, x)).epsilon(1e-8));
      CHECK(spec.sigma3(x) ==
            doctest::Approx(fd1(spec.sigma2, x)).epsilon(1e-7));
    }
    CHECK(spec.sigma(20.0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(400.0 * spec.sigma2(20.0)) < 1e-10);  // x^2 sigma'' -> 0
    CHECK(spec.sigma1(0.0) > 0.0);
  }
}

TEST_CASE("sigma1_hat matches a direct Fourier quadrature") {
  for (const char* name : {"tanh", "erf"}) {
    auto spec = regulator_by_name(name);
    for (double w : {0.0, 0.5, 2.0, 5.0}) {
      double direct = 2.0 * integrate_real(
          [&](double x) { return spec.sigma1(x) * std::cos(w * x); }, 0.0,
          25.0);
      CHECK(spec.sigma1_hat(w) == doctest::Approx(direct).epsilon(1e-9));
    }
  }
}

TEST_CASE("potential at the origin uses the analytic limit") {
  PotentialParams p(0.1, 0.5, tanh_regulator());
  // beta sigma'''(0) / (a^2 (a + beta sigma'(0))) with sigma'''(0) = -2
  CHECK(potential_eval(p, 0.0) ==
        doctest::Approx(-2.0 * 0.5 / (0.01 * 0.6)).epsilon(1e-12));
  // continuous across the series/direct switch
  CHECK(potential_eval(p, 1e-8) ==
        doctest::Approx(potential_eval(p, 0.0)).epsilon(1e-4));
}

TEST_CASE("potential is even and short-ranged") {
  for (const char* name : {"tanh", "erf"}) {
    PotentialParams p(0.1, 0.5, regulator_by_name(name));
    for (double x : {0.05, 0.2, 1.0}) {
      CHECK(potential_eval(p, x) ==
            doctest::Approx(potential_eval(p, -x)).epsilon(1e-12));
    }
    CHECK(std::abs(potential_eval(p, 10 * p.a)) <
          1e-6 * std::abs(potential_eval(p, 0.0)));
  }
}

TEST_CASE("potential_fourier: evenness and doubled-resolution oracle") {
  PotentialParams p(0.1, 0.5, tanh_regulator());
  for (double k : {0.7, 2.0, 11.0}) {
    CHECK(potential_fourier(p, k) ==
          doctest::Approx(potential_fourier(p, -k)).epsilon(1e-9));
  }
  // independent oracle: composite Simpson at fixed fine resolution
  double k = 1.0;
  const double X = 4.0;
  const int n = 1 << 16;
  const double h = X / n;
  double simpson = potential_eval(p, 0.0) + potential_eval(p, X) * std::cos(k * X);
  for (int i = 1; i < n; ++i) {
    double x = i * h;
    simpson += (i % 2 ? 4.0 : 2.0) * potential_eval(p, x) * std::cos(k * x);
  }
  simpson *= 2.0 * h / 3.0;  // even integrand, doubled to the full line
  CHECK(potential_fourier(p, 1.0) == doctest::Approx(simpson).epsilon(1e-7));
}

TEST_CASE("potential_fourier matches the small-beta expansion") {
  // Vhat(k) - Vhat(0) = F(ka)/a^2 beta + G(ka)/a^3 beta^2 + O(beta^3)
  const double a = 0.1, beta = 0.01;
  for (const char* name : {"tanh", "erf"}) {
    auto spec = regulator_by_name(name);
    auto residual = [&](double b, double k) {
      PotentialParams p(a, b, spec);
      double lhs = potential_fourier(p, k) - potential_fourier(p, 0.0);
      double rhs = b * F_func(spec, k * a) / (a * a) +
                   b * b * G_func(spec, k * a) / (a * a * a);
      return std::abs(lhs - rhs);
    };
    for (double k : {1.0, 4.0, 12.0}) {
      PotentialParams p(a, beta, spec);
      double scale = std::abs(potential_fourier(p, k) - potential_fourier(p, 0.0));
      CHECK(residual(beta, k) < 1e-2 * scale);
      // the remainder is cubic in beta
      double ratio = residual(beta, k) / residual(0.5 * beta, k);
      CHECK(ratio > 6.0);
      CHECK(ratio < 10.5);
    }
  }
}

TEST_CASE("F and G small-k laws") {
  for (const char* name : {"tanh", "erf"}) {
    auto spec = regulator_by_name(name);
    CHECK(F_func(spec, 0.0) == 0.0);
    CHECK(G_func(spec, 0.0) == 0.0);
    const double k = 1e-2;
    CHECK(F_func(spec, k) / (k * k) == doctest::Approx(1.0).epsilon(1e-4));
    double c1 = sigma1_sq_integral(spec);
    CHECK(G_func(spec, k) / (k * k) ==
          doctest::Approx(-0.5 * c1).epsilon(1e-4));
  }
}

TEST_CASE("F table against direct definition") {
  auto spec = tanh_regulator();
  for (double u : {0.3, 2.2, 8.0}) {
    // direct definition as int (e^{iux}-1) sigma''(x)/x dx
    double direct = 2.0 * integrate_real(
        [&](double x) {
          double s = std::sin(0.5 * u * x);
          double core = std::abs(x) < 1e-7
                            ? spec.sigma3(0.0)
                            : spec.sigma2(x) / x;
          return -2.0 * s * s * core;
        },
        0.0, 25.0);
    CHECK(F_eval(spec, u) == doctest::Approx(direct).epsilon(1e-6));
    CHECK(G_eval(spec, u) == doctest::Approx(G_func(spec, u)).epsilon(1e-7));
  }
}

TEST_CASE("Parseval identity for each shipped regulator") {
  for (const char* name : {"tanh", "erf"}) {
    auto spec = regulator_by_name(name);
    double c1 = sigma1_sq_integral(spec);
    double c2 = sigma1_hat_sq_integral(spec);
    CHECK(std::abs(c1 - c2) <= 1e-8);
  }
  CHECK(sigma1_sq_integral(tanh_regulator()) ==
        doctest::Approx(4.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("invalid construction is rejected") {
  CHECK_THROWS_AS(PotentialParams(-0.1, 0.5, tanh_regulator()), ConfigError);
  CHECK_THROWS_AS(PotentialParams(0.1, 0.0, tanh_regulator()), ConfigError);
  CHECK_THROWS_AS(regulator_by_name("box"), ConfigError);
}
