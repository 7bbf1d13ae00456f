#pragma once

#include <Eigen/Dense>
#include <complex>

#include "csgas/bethe.hpp"
#include "csgas/regulator.hpp"

namespace csgas {

using cdouble = std::complex<double>;

double fermi_n(const ThermalState& s, double p);

// A_m = int dp/2pi p^m n(p), m in {0, 2}
double moment_A(const ThermalState& s, int m, const QuadratureConfig& quad = {});

// sqrt with the branch cut along the positive real axis: z = r e^{i theta},
// theta in (0, 2pi), result sqrt(r) e^{i theta/2}; Im >= 0 always.
cdouble sqrt_pos_cut(cdouble z);

// First-order (static) self-energy -2 beta (A2 + A0 k^2), via the moment
// closed form and via direct quadrature of -2 beta int dq/2pi (k-q)^2 n(q).
double self_energy_first_order(const ThermalState& s, double beta, double k,
                               const QuadratureConfig& quad = {});
double self_energy_first_order_direct(const ThermalState& s, double beta,
                                      double k,
                                      const QuadratureConfig& quad = {});

// Second-order proper self-energy at complex frequency z (Matsubara i w_n or
// continued omega + i eta, Im z > 0 required for the double-integral term).
cdouble self_energy(cdouble z, double k, const ThermalState& s, double beta,
                    const QuadratureConfig& quad = {});

// eta -> 0+ limit at real omega: the inner momentum integral is split into
// principal value plus i pi residues at the real denominator roots.
cdouble self_energy_retarded(double omega, double k, const ThermalState& s,
                             double beta, const QuadratureConfig& quad = {});

// Finite-ring brute-force oracle on the momentum lattice 2 pi m / L.
struct VertexParams {
  double L;
  double a;
  double beta;
  RegulatorSpec regulator;
  int cutoff = 0;  // max |momentum index| for the vertex support; 0 = auto
  int order = 1;   // vertex expansion order in beta (1 or 2)
};

// W(p1..p4): antisymmetrized two-body vertex; zero unless p1+p2 = p3+p4.
double vertex_W(const VertexParams& v, double p1, double p2, double p3,
                double p4);

// Matsubara self-energy from discrete sums at omega_n = 2 pi T (n + 1/2).
cdouble self_energy_finite_L(int n, int k_idx, const VertexParams& v,
                             const ThermalState& s);

cdouble greens_retarded(double omega, double k, const ThermalState& s,
                        double beta, const QuadratureConfig& quad = {});

// A(omega, k) = -2 Im G^R at the configured eta
double spectral(double omega, double k, const ThermalState& s, double beta,
                const QuadratureConfig& quad = {});

struct SpectralGrid {
  Eigen::VectorXd omegas;
  Eigen::VectorXd ks;
  Eigen::MatrixXcd sigma;   // omegas.size() x ks.size()
  Eigen::MatrixXd a_vals;
  ThermalState state;
  double beta;
  double eta;
};

SpectralGrid spectral_grid(const Eigen::VectorXd& omegas,
                           const Eigen::VectorXd& ks, const ThermalState& s,
                           double beta, const QuadratureConfig& quad = {});

// int domega/2pi A(omega,k), eta-extrapolated, with the slow omega^{-3/2}
// positive tail integrated in a compactified variable.
double sum_rule(double k, const ThermalState& s, double beta,
                const QuadratureConfig& quad = {});

// Momentum-resolved contribution k^2 n_k + <V>_k to the internal energy,
// evaluated on the Matsubara axis with analytic tail subtractions.
double internal_energy_k(double k, const ThermalState& s, double beta,
                         const QuadratureConfig& quad = {});

// Galitskii-Migdal internal energy per volume,
// u = int dk/2pi domega/2pi (omega + mu + k^2)/2 A(omega,k) f(omega),
// evaluated with the eta = 0+ self-energy.
double internal_energy(const ThermalState& s, double beta,
                       const QuadratureConfig& quad = {});

}  // namespace csgas
