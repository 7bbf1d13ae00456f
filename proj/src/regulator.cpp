#include "csgas/regulator.hpp"

#include <cmath>
#include <mutex>
#include <vector>

namespace csgas {

struct RegulatorCache {
  std::once_flag f_once, g_once, c_once;
  UniformTable F, G;
  double c1 = 0.0, c2 = 0.0;
};

namespace {

constexpr double kFTableMax = 40.0;
constexpr double kGTableMax = 2.0;

double sinhc(double x) {  // sinh(x)/x
  if (std::abs(x) < 1e-8) return 1.0 + x * x / 6.0;
  return std::sinh(x) / x;
}

}  // namespace

RegulatorSpec tanh_regulator() {
  RegulatorSpec s;
  s.name = "tanh";
  s.sigma = [](double x) { return std::tanh(x); };
  s.sigma1 = [](double x) {
    double c = std::cosh(x);
    return 1.0 / (c * c);
  };
  s.sigma2 = [](double x) {
    double t = std::tanh(x);
    double s2 = 1.0 - t * t;
    return -2.0 * t * s2;
  };
  s.sigma3 = [](double x) {
    double t = std::tanh(x);
    double s2 = 1.0 - t * t;
    return -2.0 * (s2 * s2 - 2.0 * s2 * t * t);
  };
  // FT of sech^2: pi w / sinh(pi w / 2)
  s.sigma1_hat = [](double w) { return 2.0 / sinhc(M_PI * w / 2.0); };
  s.analytic_strip = M_PI / 2.0;  // sech^2 pole at i pi/2
  s.cache = std::make_shared<RegulatorCache>();
  return s;
}

RegulatorSpec erf_regulator() {
  RegulatorSpec s;
  s.name = "erf";
  const double two_over_sqrt_pi = 2.0 / std::sqrt(M_PI);
  s.sigma = [](double x) { return std::erf(x); };
  s.sigma1 = [=](double x) { return two_over_sqrt_pi * std::exp(-x * x); };
  s.sigma2 = [=](double x) {
    return -2.0 * x * two_over_sqrt_pi * std::exp(-x * x);
  };
  s.sigma3 = [=](double x) {
    return (4.0 * x * x - 2.0) * two_over_sqrt_pi * std::exp(-x * x);
  };
  s.sigma1_hat = [](double w) { return 2.0 * std::exp(-w * w / 4.0); };
  s.analytic_strip = 1e6;  // entire
  s.cache = std::make_shared<RegulatorCache>();
  return s;
}

RegulatorSpec regulator_by_name(const std::string& name) {
  if (name == "tanh") return tanh_regulator();
  if (name == "erf") return erf_regulator();
  throw ConfigError("unknown regulator '" + name + "' (expected tanh or erf)");
}

PotentialParams::PotentialParams(double a_, double beta_, RegulatorSpec reg)
    : a(a_), beta(beta_), regulator(std::move(reg)) {
  if (!(a > 0.0)) throw ConfigError("PotentialParams: a must be > 0");
  if (!(beta > 0.0)) throw ConfigError("PotentialParams: beta must be > 0");
}

std::tuple<double, double, double> sigma_eval(const RegulatorSpec& spec,
                                              double x) {
  return {spec.sigma(x), spec.sigma1(x), spec.sigma2(x)};
}

double potential_eval(const PotentialParams& p, double x) {
  const double a = p.a, beta = p.beta;
  const double u = x / a;
  if (std::abs(u) < 1e-6) {
    // analytic limit: both numerator and denominator vanish linearly at 0
    return beta * p.regulator.sigma3(0.0) /
           (a * a * (a + beta * p.regulator.sigma1(0.0)));
  }
  const double denom = x + beta * p.regulator.sigma(u);
  if (std::abs(denom) < 1e-300)
    throw DenominatorVanishes("potential_eval: x + beta sigma_a(x) = 0 at x=" +
                              std::to_string(x));
  return beta * p.regulator.sigma2(u) / (a * a * denom);
}

double potential_fourier(const PotentialParams& p, double k,
                         const QuadratureConfig& quad) {
  // Vhat(k) = (2 beta / a) int_0^inf du sigma''(u) cos(k a u) / (a u + beta sigma(u))
  const double a = p.a, beta = p.beta;
  const double ka = std::abs(k) * a;
  const double U = 40.0;
  auto f = [&](double u) {
    if (u < 1e-12) u = 1e-12;
    return p.regulator.sigma2(u) * std::cos(ka * u) /
           (a * u + beta * p.regulator.sigma(u));
  };
  std::vector<double> seeds;
  if (ka > 0.5) {
    const double half = M_PI / ka;
    for (double s = half; s < U; s += half) seeds.push_back(s);
  }
  QuadratureConfig q = quad;
  if (q.max_intervals < 8000) q.max_intervals = 8000;
  double val = integrate_real(f, 0.0, U, q, seeds);
  return 2.0 * beta / a * val;
}

double F_func(const RegulatorSpec& spec, double k) {
  const double u = std::abs(k);  // F is even and real
  auto f = [&](double x) { return x * spec.sigma1_hat(x); };
  return integrate_real(f, 0.0, std::min(u, kFTableMax + 10.0));
}

double G_func(const RegulatorSpec& spec, double k) {
  const double u = std::abs(k);
  if (u == 0.0) return 0.0;
  const double X = 20.0;
  auto f = [&](double x) {
    double s = std::sin(0.5 * u * x);
    double cm1 = -2.0 * s * s;  // cos(ux) - 1
    double core;                // sigma''(x) sigma(x) / x^2, regular at 0
    if (std::abs(x) < 1e-6) {
      core = spec.sigma3(0.0) * spec.sigma1(0.0);
    } else {
      core = spec.sigma2(x) * spec.sigma(x) / (x * x);
    }
    return cm1 * core;
  };
  std::vector<double> seeds;
  if (u > 0.5) {
    const double half = M_PI / u;
    for (double s = half; s < X; s += half) seeds.push_back(s);
  }
  QuadratureConfig q;
  q.max_intervals = 8000;
  return -2.0 * integrate_real(f, 0.0, X, q, seeds);
}

const UniformTable& F_table(const RegulatorSpec& spec) {
  auto& c = *spec.cache;
  std::call_once(c.f_once, [&]() {
    const double du = 0.004;
    const int n = static_cast<int>(kFTableMax / du) + 1;
    std::vector<double> v(n);
    v[0] = 0.0;
    auto f = [&](double x) { return x * spec.sigma1_hat(x); };
    for (int i = 1; i < n; ++i) {
      double lo = (i - 1) * du, hi = i * du;
      v[i] = v[i - 1] + integrate_real(f, lo, hi);
    }
    c.F = UniformTable(0.0, du, std::move(v));
  });
  return c.F;
}

const UniformTable& G_table(const RegulatorSpec& spec) {
  auto& c = *spec.cache;
  std::call_once(c.g_once, [&]() {
    const double du = 0.002;
    const int n = static_cast<int>(kGTableMax / du) + 1;
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = G_func(spec, i * du);
    c.G = UniformTable(0.0, du, std::move(v));
  });
  return c.G;
}

double F_eval(const RegulatorSpec& spec, double u) {
  const auto& t = F_table(spec);
  u = std::abs(u);
  if (u >= kFTableMax) return t(kFTableMax);  // saturated
  return t(u);
}

double G_eval(const RegulatorSpec& spec, double u) {
  u = std::abs(u);
  if (u > kGTableMax) return G_func(spec, u);
  return G_table(spec)(u);
}

double sigma1_sq_integral(const RegulatorSpec& spec) {
  auto f = [&](double x) {
    double s1 = spec.sigma1(x);
    return s1 * s1;
  };
  return 2.0 * integrate_real(f, 0.0, 25.0);
}

double sigma1_hat_sq_integral(const RegulatorSpec& spec) {
  auto f = [&](double w) {
    double sh = spec.sigma1_hat(w);
    return sh * sh;
  };
  return 2.0 * integrate_real(f, 0.0, 60.0) / (2.0 * M_PI);
}

}  // namespace csgas
