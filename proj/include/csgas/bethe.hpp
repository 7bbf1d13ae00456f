#pragma once

#include <Eigen/Dense>
#include <vector>

#include "csgas/quadrature.hpp"

namespace csgas {

struct ThermalState {
  double T;
  double mu;
};

// Solved Lieb-Liniger Bethe state on a ring.
struct BetheState {
  int N;
  double L;
  double c;
  std::vector<double> I;    // quantum numbers (half-odd-integer for even N)
  Eigen::VectorXd roots;    // ordered rapidities
  double residual;          // sup-norm of the Bethe equations at the roots
  int iterations;
};

// Ground-state quantum numbers: I_j = j - (N+1)/2, j = 1..N.
std::vector<double> ground_state_numbers(int N);

// Newton iteration on L lambda_j + sum_k 2 atan((lambda_j-lambda_k)/c)
// = 2 pi I_j from the free seed lambda_j = 2 pi I_j / L, with geometric
// c-continuation from the near-free regime when the direct solve diverges.
BetheState bethe_solve(int N, double L, double c, std::vector<double> I = {});

double bethe_energy(const BetheState& st);    // sum lambda_j^2
double bethe_momentum(const BetheState& st);  // sum lambda_j

// Yang-Yang thermodynamics of the Lieb-Liniger gas.
struct TBASolution {
  Eigen::VectorXd grid;     // uniform rapidity grid
  Eigen::VectorXd epsilon;  // pseudo-energy
  Eigen::VectorXd rho;      // particle density rho_t / (1 + e^{eps/T})
  Eigen::VectorXd rho_t;    // total density
  double energy_density;
  double particle_density;
  double pressure;
};

// Fixed point of eps(l) = l^2 - mu - (T/2pi) int K(l-l') ln(1+e^{-eps'/T}),
// K(x) = 2c/(c^2+x^2), then the linear equation
// 2pi rho_t = 1 + K * (f rho_t) for the densities.
TBASolution yang_yang_solve(const ThermalState& s, double c,
                            const QuadratureConfig& quad = {});

// Thermal energy density with the kernel expanded to leading order in 1/c
// (K -> 2/c; the next term is already 1/c^3).  The dressing reduces to a
// chemical-potential shift of the pseudo-energy plus a uniform total-density
// enhancement 2 pi rho_t = 1 + 2D/c.  Accurate to O(1/c^3).
double tba_energy_expansion(const ThermalState& s, double c,
                            const QuadratureConfig& quad = {});

}  // namespace csgas
