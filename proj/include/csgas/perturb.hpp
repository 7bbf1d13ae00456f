#pragma once

#include <utility>
#include <vector>

#include "csgas/regulator.hpp"

namespace csgas {

// Particle density rho(lambda) of a free-fermion macro state,
// 0 <= rho <= 1/(2pi); the hole density is 1/(2pi) - rho.
struct RootDensity {
  std::function<double(double)> rho;
  double lambda_max = 0.0;      // |rho| negligible beyond this
  std::vector<double> kinks;    // discontinuities, seeded into quadratures
};

RootDensity thermal_density(double T, double mu);
RootDensity fermi_sea(double kf);

struct MacroScalars {
  double density;  // D = int rho
  double energy;   // E = int rho lambda^2
};

MacroScalars macro_scalars(const RootDensity& d,
                           const QuadratureConfig& quad = {});

struct EnergyOrders {
  double e0, e1, e2;
  double e_closed;         // (1 - 2 beta D + 3 beta^2 D^2) E
  double cancel_residual;  // (e0 + e1 + e2) - e_closed
};

// Energy per length through second order in beta at fixed regulator width a.
// The potential is expanded in beta first (vertex beta F(ka)/a^2 at first
// order plus beta^2 G(ka)/a^3 at second), so e1 and e2 carry compensating
// 1/a divergences while their sum stays finite as a -> 0.
EnergyOrders e_orders(const PotentialParams& p, const RootDensity& d,
                      const QuadratureConfig& quad = {});

// Coefficients of the 1/a parts of e1 and e2:
// {beta^2 c1 D E, -beta^2 c2 D E} with c1 = int sigma'^2 and
// c2 = (1/2pi) int sigmahat'^2 (equal by Parseval).
std::pair<double, double> divergence_coefficients(const PotentialParams& p,
                                                  const RootDensity& d);

double e_closed(double beta, const RootDensity& d);

}  // namespace csgas
