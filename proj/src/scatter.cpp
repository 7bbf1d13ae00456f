#include "csgas/scatter.hpp"

#include <algorithm>
#include <cmath>

namespace csgas {

namespace {

std::vector<double> build_grid(double a, const GridConfig& g) {
  double h_core = g.h_core > 0.0 ? g.h_core : a / 100.0;
  if (h_core > a / 50.0)
    throw StepTooCoarse("grid step " + std::to_string(h_core) +
                        " exceeds a/50 = " + std::to_string(a / 50.0));
  std::vector<double> xs;
  xs.push_back(0.0);
  double x = 0.0, h = h_core;
  const double core = g.core_extent * a;
  while (x < 1.0) {
    if (x >= core) h = std::min(h * g.growth, g.h_outer);
    x += h;
    if (x > 1.0 - 0.25 * h) x = 1.0;
    xs.push_back(x);
  }
  return xs;
}

Wavefunction make_wavefunction(const std::vector<double>& xs, double k) {
  Wavefunction w;
  w.k = k;
  w.grid = Eigen::Map<const Eigen::ArrayXd>(xs.data(), xs.size());
  w.psi = Eigen::ArrayXd::Zero(xs.size());
  w.dpsi = Eigen::ArrayXd::Zero(xs.size());
  return w;
}

void rescale_to_unit_boundary(Wavefunction& w) {
  double end = w.psi[w.psi.size() - 1];
  if (std::abs(end) < 1e-300)
    throw IntegratorDiverged("solution vanishes at the boundary x=1");
  w.psi /= end;
  w.dpsi /= end;
}

// t-variable integrand of the phi_plus quadrature formula
double phi_plus_integrand(const PotentialParams& p, double t) {
  const double a = p.a, beta = p.beta;
  const auto& r = p.regulator;
  if (t > 60.0) return 0.0;  // sigma'' underflows
  if (t < 1e-8) {
    double s1 = r.sigma1(0.0);
    double d = 1.0 + beta * s1 / a;
    return beta * r.sigma3(0.0) / (a * (a + beta * s1) * d * d);
  }
  double d = 1.0 + beta * r.sigma1(t) / a;
  return beta * r.sigma2(t) / (a * (a * t + beta * r.sigma(t)) * d * d);
}

}  // namespace

double Wavefunction::value(double x) const {
  double ax = std::abs(x);
  auto n = grid.size();
  const double* lo = grid.data();
  const double* hi = grid.data() + n;
  const double* it = std::upper_bound(lo, hi, ax);
  long i = std::clamp<long>(it - lo - 1, 0, n - 2);
  double t = (ax - grid[i]) / (grid[i + 1] - grid[i]);
  double v = (1 - t) * psi[i] + t * psi[i + 1];
  return x < 0 ? -v : v;
}

double Wavefunction::derivative(double x) const {
  double ax = std::abs(x);
  auto n = grid.size();
  const double* lo = grid.data();
  const double* it = std::upper_bound(lo, lo + n, ax);
  long i = std::clamp<long>(it - lo - 1, 0, n - 2);
  double t = (ax - grid[i]) / (grid[i + 1] - grid[i]);
  return (1 - t) * dpsi[i] + t * dpsi[i + 1];
}

Wavefunction solve_smooth(const PotentialParams& p, double k,
                          const GridConfig& grid) {
  auto xs = build_grid(p.a, grid);
  auto w = make_wavefunction(xs, k);
  double psi = 0.0, dpsi = 1.0;  // linear problem: shoot and rescale
  w.psi[0] = psi;
  w.dpsi[0] = dpsi;
  auto rhs = [&](double x, double y, double dy, double& f0, double& f1) {
    f0 = dy;
    f1 = (potential_eval(p, x) - k * k) * y;
  };
  for (size_t i = 0; i + 1 < xs.size(); ++i) {
    double x0 = xs[i], x1 = xs[i + 1];
    double vm = std::abs(potential_eval(p, 0.5 * (x0 + x1)));
    int nsub = std::max(
        1, (int)std::ceil((x1 - x0) * std::sqrt(vm + k * k) / 0.05));
    double h = (x1 - x0) / nsub;
    for (int s = 0; s < nsub; ++s) {
      double x = x0 + s * h;
      double k1p, k1d, k2p, k2d, k3p, k3d, k4p, k4d;
      rhs(x, psi, dpsi, k1p, k1d);
      rhs(x + 0.5 * h, psi + 0.5 * h * k1p, dpsi + 0.5 * h * k1d, k2p, k2d);
      rhs(x + 0.5 * h, psi + 0.5 * h * k2p, dpsi + 0.5 * h * k2d, k3p, k3d);
      rhs(x + h, psi + h * k3p, dpsi + h * k3d, k4p, k4d);
      psi += h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
      dpsi += h / 6.0 * (k1d + 2 * k2d + 2 * k3d + k4d);
      if (!std::isfinite(psi) || std::abs(psi) > 1e250)
        throw IntegratorDiverged("solve_smooth overflow at x=" +
                                 std::to_string(x));
    }
    w.psi[i + 1] = psi;
    w.dpsi[i + 1] = dpsi;
  }
  rescale_to_unit_boundary(w);
  return w;
}

Wavefunction solve_naive(const PotentialParams& p, double k,
                         const GridConfig& grid) {
  const double a = p.a, beta = p.beta;
  auto xs = build_grid(a, grid);
  auto w = make_wavefunction(xs, k);
  const double s = 1.0 - beta / (2.0 * a);
  if (std::abs(s) < 1e-12)
    throw DenominatorVanishes("solve_naive: beta = 2a is degenerate");
  // inside |x| < a:  s psi'' + k^2 psi = 0,  psi(0)=0, psi'(0)=1
  auto inner = [&](double x, double& v, double& dv) {
    if (k == 0.0) {
      v = x;
      dv = 1.0;
    } else if (s > 0.0) {
      double kap = k / std::sqrt(s);
      v = std::sin(kap * x) / kap;
      dv = std::cos(kap * x);
    } else {
      double q = k / std::sqrt(-s);
      v = std::sinh(q * x) / q;
      dv = std::cosh(q * x);
    }
  };
  double va, dva;
  inner(a, va, dva);
  const double dva_out = s * dva;  // (1 - beta sigma_a') psi' is continuous
  auto outer = [&](double x, double& v, double& dv) {
    double d = x - a;
    if (k == 0.0) {
      v = va + dva_out * d;
      dv = dva_out;
    } else {
      v = va * std::cos(k * d) + dva_out / k * std::sin(k * d);
      dv = -va * k * std::sin(k * d) + dva_out * std::cos(k * d);
    }
  };
  for (Eigen::Index i = 0; i < w.grid.size(); ++i) {
    double x = w.grid[i];
    if (x <= a)
      inner(x, w.psi[i], w.dpsi[i]);
    else
      outer(x, w.psi[i], w.dpsi[i]);
  }
  rescale_to_unit_boundary(w);
  return w;
}

Wavefunction cs_double_delta(double a, double beta, double k,
                             const GridConfig& grid) {
  if (!(a > 0.0) || !(beta > 0.0))
    throw ConfigError("cs_double_delta: a and beta must be > 0");
  auto xs = build_grid(a, grid);
  auto w = make_wavefunction(xs, k);
  const double g = 1.0 / beta - 1.0 / a;
  // inside: psi = sin(kx)/k; at x=a the derivative jumps by g psi(a)
  auto inner = [&](double x, double& v, double& dv) {
    if (k == 0.0) {
      v = x;
      dv = 1.0;
    } else {
      v = std::sin(k * x) / k;
      dv = std::cos(k * x);
    }
  };
  double va, dva;
  inner(a, va, dva);
  const double dva_out = dva + g * va;
  auto outer = [&](double x, double& v, double& dv) {
    double d = x - a;
    if (k == 0.0) {
      v = va + dva_out * d;
      dv = dva_out;
    } else {
      v = va * std::cos(k * d) + dva_out / k * std::sin(k * d);
      dv = -va * k * std::sin(k * d) + dva_out * std::cos(k * d);
    }
  };
  for (Eigen::Index i = 0; i < w.grid.size(); ++i) {
    double x = w.grid[i];
    if (x <= a)
      inner(x, w.psi[i], w.dpsi[i]);
    else
      outer(x, w.psi[i], w.dpsi[i]);
  }
  rescale_to_unit_boundary(w);
  return w;
}

JumpReport extract_jump(const Wavefunction& w, double a, double k) {
  const double x_lo = std::max(10.0 * a, 1e-3);
  const double x_hi = 0.1;
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < w.grid.size(); ++i)
    if (w.grid[i] >= x_lo && w.grid[i] <= x_hi) idx.push_back(i);
  if (idx.size() < 20)
    throw WindowEmpty("fit window [" + std::to_string(x_lo) + "," +
                      std::to_string(x_hi) + "] holds " +
                      std::to_string(idx.size()) + " samples (< 20)");
  Eigen::MatrixXd M(idx.size(), 2);
  Eigen::VectorXd y(idx.size());
  for (size_t r = 0; r < idx.size(); ++r) {
    double x = w.grid[idx[r]];
    if (k > 0.0) {
      M(r, 0) = std::sin(k * x);
      M(r, 1) = std::cos(k * x);
    } else {
      M(r, 0) = x;
      M(r, 1) = 1.0;
    }
    y(r) = w.psi[idx[r]];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU |
                                               Eigen::ComputeThinV);
  double cond = svd.singularValues()(0) / svd.singularValues()(1);
  if (!(cond < 1e8))
    throw IllConditionedFit(
        "sin/cos basis nearly collinear on the window (cond " +
        std::to_string(cond) + "); enlarge the window or k");
  Eigen::Vector2d c = svd.solve(y);
  const double A = c(0), B = c(1);
  JumpReport rep;
  rep.jump = 2.0 * B;
  rep.slope = k > 0.0 ? A * k : A;
  rep.ratio = B / rep.slope;
  rep.phase_shift = std::atan2(B, A);
  rep.x_lo = x_lo;
  rep.x_hi = x_hi;
  rep.residual = std::sqrt((M * c - y).squaredNorm() / y.size());
  return rep;
}

std::pair<double, double> homogeneous_solutions(const PotentialParams& p,
                                                double x,
                                                const QuadratureConfig& quad) {
  const double a = p.a, beta = p.beta;
  const auto& r = p.regulator;
  const double ax = std::abs(x);
  const double t = ax / a;
  double phi_minus = x + beta * r.sigma(x / a);
  double I = integrate_real([&](double u) { return phi_plus_integrand(p, u); },
                            0.0, std::min(t, 60.0), quad,
                            {0.5, 1.0, 2.0, 4.0, 8.0});
  double phi_plus = 1.0 / (1.0 + beta * r.sigma1(t) / a) +
                    (ax + beta * r.sigma(t)) * I;
  return {phi_minus, phi_plus};
}

Wavefunction volterra_solve(const PotentialParams& p, double k,
                            const QuadratureConfig& quad,
                            const GridConfig& grid,
                            std::vector<double>* residual_history) {
  GridConfig g = grid;
  g.h_outer = std::min(g.h_outer, 1e-3);
  g.growth = std::min(g.growth, 1.03);
  auto xs = build_grid(p.a, g);
  const auto n = static_cast<Eigen::Index>(xs.size());
  const double a = p.a, beta = p.beta;
  const auto& r = p.regulator;

  Eigen::ArrayXd pm(n), dpm(n), pp(n), dpp(n);
  // cumulative quadrature of the phi_plus integral, panel by panel
  double I = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double t = xs[i] / a;
    if (i > 0) {
      double t0 = std::min(xs[i - 1] / a, 60.0), t1 = std::min(t, 60.0);
      if (t1 > t0)
        I += integrate_real(
            [&](double u) { return phi_plus_integrand(p, u); }, t0, t1, quad);
    }
    double s1 = r.sigma1(t);
    pm[i] = xs[i] + beta * r.sigma(t);
    dpm[i] = 1.0 + beta * s1 / a;
    pp[i] = 1.0 / (1.0 + beta * s1 / a) + pm[i] * I;
    dpp[i] = (1.0 + beta * s1 / a) * I;
  }

  auto w = make_wavefunction(xs, k);
  Eigen::ArrayXd psi = pm;  // A phi_minus seed with A=1
  Eigen::ArrayXd cm(n), cp(n);
  const int max_iter = 200;
  double prev_res = 0.0;
  bool converged = false;
  for (int it = 0; it < max_iter; ++it) {
    // trapezoid cumulatives of psi*phi_minus and psi*phi_plus
    cm[0] = cp[0] = 0.0;
    for (Eigen::Index i = 1; i < n; ++i) {
      double h = xs[i] - xs[i - 1];
      cm[i] = cm[i - 1] + 0.5 * h * (psi[i] * pm[i] + psi[i - 1] * pm[i - 1]);
      cp[i] = cp[i - 1] + 0.5 * h * (psi[i] * pp[i] + psi[i - 1] * pp[i - 1]);
    }
    Eigen::ArrayXd next = k * k * (pp * cm - pm * cp) + pm;
    double res = (next - psi).abs().maxCoeff();
    if (residual_history) residual_history->push_back(res);
    psi = next;
    if (res < 1e-13 * std::max(1.0, psi.abs().maxCoeff())) {
      converged = true;
      break;
    }
    prev_res = res;
  }
  (void)prev_res;
  if (!converged)
    throw IterationNotConverged("volterra_solve: no fixed point after " +
                                std::to_string(max_iter) + " iterations");
  w.psi = psi;
  w.dpsi = k * k * (dpp * cm - dpm * cp) + dpm;
  rescale_to_unit_boundary(w);
  return w;
}

}  // namespace csgas
