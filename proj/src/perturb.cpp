#include "csgas/perturb.hpp"

#include <cmath>

namespace csgas {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

double hole(const RootDensity& d, double x) {
  return 1.0 / kTwoPi - d.rho(x);
}

}  // namespace

RootDensity thermal_density(double T, double mu) {
  if (!(T > 0.0)) throw ConfigError("thermal_density: T must be > 0");
  RootDensity d;
  d.rho = [T, mu](double l) {
    return 1.0 / (kTwoPi * (1.0 + std::exp((l * l - mu) / T)));
  };
  d.lambda_max = std::sqrt(std::max(T, mu + 36.0 * T));
  return d;
}

RootDensity fermi_sea(double kf) {
  if (!(kf > 0.0)) throw ConfigError("fermi_sea: kf must be > 0");
  RootDensity d;
  d.rho = [kf](double l) { return std::abs(l) < kf ? 1.0 / kTwoPi : 0.0; };
  d.lambda_max = kf;
  d.kinks = {-kf, kf};
  return d;
}

MacroScalars macro_scalars(const RootDensity& d, const QuadratureConfig& quad) {
  double L = d.lambda_max;
  MacroScalars m;
  m.density = integrate_real(d.rho, -L, L, quad, d.kinks);
  m.energy = integrate_real([&](double l) { return d.rho(l) * l * l; }, -L, L,
                            quad, d.kinks);
  return m;
}

double e_closed(double beta, const RootDensity& d) {
  auto m = macro_scalars(d);
  double bd = beta * m.density;
  return (1.0 - 2.0 * bd + 3.0 * bd * bd) * m.energy;
}

std::pair<double, double> divergence_coefficients(const PotentialParams& p,
                                                  const RootDensity& d) {
  auto m = macro_scalars(d);
  double b2de = p.beta * p.beta * m.density * m.energy;
  return {b2de * sigma1_sq_integral(p.regulator),
          -b2de * sigma1_hat_sq_integral(p.regulator)};
}

EnergyOrders e_orders(const PotentialParams& p, const RootDensity& d,
                      const QuadratureConfig& quad) {
  const double a = p.a, beta = p.beta;
  const auto& reg = p.regulator;
  const double L = d.lambda_max;

  // beta-expanded vertex: Vhat(k) - Vhat(0) = beta F(ka)/a^2 + beta^2 G(ka)/a^3
  auto v1 = [&](double k) { return beta * F_eval(reg, k * a) / (a * a); };
  auto v12 = [&](double k) {
    return v1(k) + beta * beta * G_eval(reg, k * a) / (a * a * a);
  };

  EnergyOrders out{};
  out.e0 = integrate_real([&](double l) { return d.rho(l) * l * l; }, -L, L,
                          quad, d.kinks);

  QuadratureConfig q1 = quad;
  q1.rel_tol = std::max(quad.rel_tol, 1e-8);
  out.e1 = -integrate_real(
      [&](double l) {
        if (d.rho(l) == 0.0) return 0.0;
        return d.rho(l) * integrate_real(
                              [&](double mu) { return d.rho(mu) * v12(l - mu); },
                              -L, L, q1, d.kinks);
      },
      -L, L, q1, d.kinks);

  // e2 = pi int dl ds rho(l) rho(l+s) I(l,s); the inner integrand is
  // symmetric under nu -> s - nu, so partial fractions collapse the
  // double-pole denominator nu (s - nu) to a single principal value:
  //   I(l,s) = (2/s) PV int dnu f(nu)/nu,
  //   f(nu)  = rho_h(l+nu) rho_h(l+s-nu) [V1(nu-s) - V1(nu)]^2.
  // The l <-> mu symmetry restricts s > 0 at twice the weight.
  const int n_gl = quad.n_pts > 0 ? quad.n_pts : 48;
  QuadratureConfig qpv = quad;
  qpv.rel_tol = std::max(quad.rel_tol, 1e-7);
  qpv.max_intervals = std::max(quad.max_intervals, 6000);
  const double s_min = 1e-3;
  auto inner = [&](double l, double s) {
    auto f = [&](double nu) {
      double dv = v1(nu - s) - v1(nu);
      if (dv == 0.0) return 0.0;
      return hole(d, l + nu) * hole(d, l + s - nu) * dv * dv;
    };
    double N = 40.0 / a + s + 1.0;
    // seed the hole-density notches and a coarse dyadic split of the long
    // tails so the error estimator cannot overlook narrow features
    std::vector<double> seeds;
    for (double c : {-l, l + s}) {
      seeds.push_back(c - 2.0);
      seeds.push_back(c);
      seeds.push_back(c + 2.0);
    }
    for (double t = 4.0; t < N; t *= 2.0) {
      seeds.push_back(t);
      seeds.push_back(-t);
    }
    double pv = pv_integrate<double>(f, 0.0, -N, N, 0.45, qpv, seeds);
    return 2.0 / s * pv;
  };
  auto nodes_l = gauss_legendre(n_gl, -L, L);
  auto nodes_s = gauss_legendre(n_gl, s_min, 2.0 * L);
  double e2 = 0.0;
  for (const auto& [l, wl] : nodes_l) {
    double rl = d.rho(l);
    if (rl == 0.0) continue;
    for (const auto& [s, ws] : nodes_s) {
      double rm = d.rho(l + s);
      if (rm == 0.0) continue;
      e2 += wl * ws * rl * rm * inner(l, s);
    }
  }
  out.e2 = 2.0 * M_PI * e2;

  out.e_closed = e_closed(beta, d);
  out.cancel_residual = (out.e0 + out.e1 + out.e2) - out.e_closed;
  return out;
}

}  // namespace csgas
