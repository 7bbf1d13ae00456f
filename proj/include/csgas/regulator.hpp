#pragma once

#include <functional>
#include <memory>
#include <string>
#include <tuple>

#include "csgas/quadrature.hpp"

namespace csgas {

struct RegulatorCache;

// Odd regulator profile sigma with its derivatives and the Fourier transform
// of sigma' (convention fhat(w) = int f(x) e^{iwx} dx).  sigma(x) -> 1 as
// x -> inf, x^2 sigma''(x) -> 0, sigma'(0) > 0, sigma' >= 0.
struct RegulatorSpec {
  std::string name;
  std::function<double(double)> sigma;
  std::function<double(double)> sigma1;
  std::function<double(double)> sigma2;
  std::function<double(double)> sigma3;
  std::function<double(double)> sigma1_hat;
  double analytic_strip = 0.0;  // sigma' holomorphic for |Im z| < analytic_strip

  std::shared_ptr<RegulatorCache> cache;  // shared across copies
};

RegulatorSpec tanh_regulator();
RegulatorSpec erf_regulator();
RegulatorSpec regulator_by_name(const std::string& name);

// Regularized interaction V_{a,beta}(x) = beta sigma''_a(x) / (x + beta sigma_a(x)),
// sigma_a(x) = sigma(x/a).
struct PotentialParams {
  double a;
  double beta;
  RegulatorSpec regulator;

  PotentialParams(double a_, double beta_, RegulatorSpec reg);
};

std::tuple<double, double, double> sigma_eval(const RegulatorSpec& spec,
                                              double x);

double potential_eval(const PotentialParams& p, double x);

// Vhat_{a,beta}(k) = int dx V_{a,beta}(x) e^{ikx}  (real by evenness of V)
double potential_fourier(const PotentialParams& p, double k,
                         const QuadratureConfig& quad = {});

// F(k) = int dx (e^{ikx}-1) sigma''(x)/x       = int_0^k dx x sigmahat'(x)
// G(k) = -int dx (e^{ikx}-1) sigma''(x) sigma(x)/x^2
double F_func(const RegulatorSpec& spec, double k);
double G_func(const RegulatorSpec& spec, double k);

// Cached tables of F and G (F on |u| <= 40 where it saturates; G on |u| <= 2,
// the range reached by the beta-expanded vertex at the cutoffs in use).
const UniformTable& F_table(const RegulatorSpec& spec);
const UniformTable& G_table(const RegulatorSpec& spec);
double F_eval(const RegulatorSpec& spec, double u);  // table + saturation
double G_eval(const RegulatorSpec& spec, double u);

double sigma1_sq_integral(const RegulatorSpec& spec);      // int sigma'(x)^2 dx
double sigma1_hat_sq_integral(const RegulatorSpec& spec);  // (1/2pi) int sigmahat'(w)^2 dw

}  // namespace csgas
