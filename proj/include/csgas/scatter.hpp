#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "csgas/regulator.hpp"

namespace csgas {

// Sample grid for the two-particle problem on [0,1]: geometric refinement
// inside the potential core, uniform outside.
struct GridConfig {
  double h_core = 0.0;       // core step; 0 = a/100 (must be <= a/50)
  double core_extent = 10.0; // core is |x| <= core_extent * a
  double h_outer = 2.5e-3;
  double growth = 1.05;
};

// Odd two-particle wave function sampled on [0,1]; the x<0 half follows from
// psi(-x) = -psi(x), psi'(-x) = psi'(x).
struct Wavefunction {
  Eigen::ArrayXd grid;
  Eigen::ArrayXd psi;
  Eigen::ArrayXd dpsi;
  double k = 0.0;

  double value(double x) const;       // odd extension, linear interpolation
  double derivative(double x) const;  // even extension
};

// Outcome of the sinusoid fit outside the core.
struct JumpReport {
  double jump;         // psi(0+) - psi(0-)
  double slope;        // psi'(0)
  double ratio;        // jump / (2 slope); converges to beta
  double phase_shift;  // atan2(B, A) for psi ~ A sin(kx) + B cos(kx)
  double x_lo, x_hi;   // fit window
  double residual;     // RMS of the fit
};

Wavefunction solve_smooth(const PotentialParams& p, double k,
                          const GridConfig& grid = {});

// Naive regularization of the delta'-type equation,
//   psi'' + k^2 psi = beta (sigma_a' psi')',
// with the top-hat profile sigma_a'(x) = 1/(2a) on |x| < a (piecewise exact).
// A smooth profile makes the leading coefficient 1 - beta sigma_a'(x) vanish
// at an interior point once beta > a sigma'(0), where no bounded odd solution
// exists, so the top-hat is used for every regulator.
Wavefunction solve_naive(const PotentialParams& p, double k,
                         const GridConfig& grid = {});

// Exact odd solution for the double-delta potential
// [1/beta - 1/a] (delta(x+a) + delta(x-a)).
Wavefunction cs_double_delta(double a, double beta, double k,
                             const GridConfig& grid = {});

JumpReport extract_jump(const Wavefunction& w, double a, double k);

// (phi_minus, phi_plus) at x: the odd and even solutions of the k=0 equation.
std::pair<double, double> homogeneous_solutions(const PotentialParams& p,
                                                double x,
                                                const QuadratureConfig& quad = {});

Wavefunction volterra_solve(const PotentialParams& p, double k,
                            const QuadratureConfig& quad = {},
                            const GridConfig& grid = {},
                            std::vector<double>* residual_history = nullptr);

}  // namespace csgas
