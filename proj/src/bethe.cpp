#include "csgas/bethe.hpp"

#include <algorithm>
#include <cmath>

#include "csgas/perturb.hpp"

namespace csgas {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

// One Newton solve at fixed c; returns false when the iteration degrades.
bool newton_at(double L, double c, const std::vector<double>& I,
               Eigen::VectorXd& lam, double& residual, int& iters) {
  const int n = static_cast<int>(I.size());
  Eigen::VectorXd F(n);
  Eigen::MatrixXd J(n, n);
  double prev = HUGE_VAL;
  for (int it = 0; it < 80; ++it) {
    for (int j = 0; j < n; ++j) {
      double s = L * lam[j] - kTwoPi * I[j];
      for (int k = 0; k < n; ++k)
        if (k != j) s += 2.0 * std::atan((lam[j] - lam[k]) / c);
      F[j] = s;
    }
    double res = F.lpNorm<Eigen::Infinity>();
    if (!std::isfinite(res) || res > 10.0 * prev + 1.0) return false;
    prev = std::min(prev, res);
    if (res <= 1e-12 * std::max(1.0, L)) {
      residual = res;
      iters = it;
      return true;
    }
    J.setZero();
    for (int j = 0; j < n; ++j) {
      double diag = L;
      for (int k = 0; k < n; ++k) {
        if (k == j) continue;
        double d = lam[j] - lam[k];
        double kern = 2.0 * c / (c * c + d * d);
        diag += kern;
        J(j, k) = -kern;
      }
      J(j, j) = diag;
    }
    lam -= J.partialPivLu().solve(F);
  }
  return false;
}

}  // namespace

std::vector<double> ground_state_numbers(int N) {
  std::vector<double> I(N);
  for (int j = 0; j < N; ++j) I[j] = j - 0.5 * (N - 1);
  return I;
}

BetheState bethe_solve(int N, double L, double c, std::vector<double> I) {
  if (N < 1 || !(L > 0.0) || !(c > 0.0))
    throw ConfigError("bethe_solve: need N >= 1, L > 0, c > 0");
  if (I.empty()) I = ground_state_numbers(N);
  if (static_cast<int>(I.size()) != N)
    throw ConfigError("bethe_solve: quantum number count != N");
  std::sort(I.begin(), I.end());
  for (int j = 0; j + 1 < N; ++j)
    if (I[j] == I[j + 1])
      throw ConfigError("bethe_solve: quantum numbers must be distinct");

  BetheState st;
  st.N = N;
  st.L = L;
  st.c = c;
  st.I = I;
  Eigen::VectorXd lam(N);
  for (int j = 0; j < N; ++j) lam[j] = kTwoPi * I[j] / L;

  if (!newton_at(L, c, I, lam, st.residual, st.iterations)) {
    // continuation from the near-free regime down to the requested coupling
    for (int j = 0; j < N; ++j) lam[j] = kTwoPi * I[j] / L;
    double chi = std::max(c, 1e4);
    bool ok = true;
    while (true) {
      ok = newton_at(L, chi, I, lam, st.residual, st.iterations);
      if (!ok || chi == c) break;
      chi = std::max(c, 0.5 * chi);
    }
    if (!ok)
      throw NewtonDiverged("bethe_solve: continuation failed at c = " +
                           std::to_string(chi));
  }
  std::sort(lam.data(), lam.data() + N);
  st.roots = lam;
  return st;
}

double bethe_energy(const BetheState& st) { return st.roots.squaredNorm(); }

double bethe_momentum(const BetheState& st) { return st.roots.sum(); }

TBASolution yang_yang_solve(const ThermalState& s, double c,
                            const QuadratureConfig& quad) {
  if (!(s.T > 0.0) || !(c > 0.0))
    throw ConfigError("yang_yang_solve: need T > 0 and c > 0");
  const double T = s.T, mu = s.mu;
  const double tol_exp = 23.03;  // ln(1e10)
  const double Lam = std::max(6.0 * std::sqrt(T * tol_exp),
                              6.0 * std::sqrt(std::abs(mu)));
  const int n = quad.n_pts > 0 ? quad.n_pts | 1 : 801;
  const double h = 2.0 * Lam / (n - 1);

  TBASolution out;
  out.grid.resize(n);
  for (int i = 0; i < n; ++i) out.grid[i] = -Lam + i * h;
  Eigen::VectorXd bare = out.grid.array().square() - mu;
  Eigen::VectorXd eps = bare;

  Eigen::MatrixXd K(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double d = out.grid[i] - out.grid[j];
      K(i, j) = 2.0 * c / (c * c + d * d);
    }
  Eigen::VectorXd w = Eigen::VectorXd::Constant(n, h);
  w[0] = w[n - 1] = 0.5 * h;

  auto softplus = [&](double e) {
    // T ln(1 + e^{-e/T}) without overflow
    double x = -e / T;
    return x > 30.0 ? -e : T * std::log1p(std::exp(std::min(x, 30.0)));
  };
  Eigen::VectorXd g(n), next(n);
  bool converged = false;
  for (int it = 0; it < 2000; ++it) {
    for (int i = 0; i < n; ++i) g[i] = softplus(eps[i]) * w[i];
    next = bare - (K * g) / kTwoPi;
    double diff = (next - eps).lpNorm<Eigen::Infinity>();
    eps = next;
    if (diff < 1e-13 * std::max(1.0, T)) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw IterationNotConverged("yang_yang_solve: pseudo-energy fixed point");
  if (std::exp(-eps[0] / T) > 1e-10 || std::exp(-eps[n - 1] / T) > 1e-10)
    throw GridTooNarrow("yang_yang_solve: occupation at the grid edge");
  out.epsilon = eps;

  Eigen::VectorXd f(n);
  for (int i = 0; i < n; ++i) f[i] = 1.0 / (1.0 + std::exp(eps[i] / T));
  Eigen::MatrixXd M = kTwoPi * Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) -= K(i, j) * f[j] * w[j];
  out.rho_t = M.partialPivLu().solve(Eigen::VectorXd::Ones(n));
  out.rho = out.rho_t.cwiseProduct(f);
  out.particle_density = w.dot(out.rho);
  out.energy_density = w.dot(out.rho.cwiseProduct(out.grid.array().square().matrix()));
  double pr = 0.0;
  for (int i = 0; i < n; ++i) pr += w[i] * softplus(eps[i]);
  out.pressure = pr / kTwoPi;
  return out;
}

double tba_energy_expansion(const ThermalState& s, double c,
                            const QuadratureConfig& quad) {
  if (!(s.T > 0.0) || !(c > 0.0))
    throw ConfigError("tba_energy_expansion: need T > 0 and c > 0");
  const double T = s.T;
  auto shift = [&](double mu_eff) {
    double Lam = std::sqrt(40.0 * T + std::max(mu_eff, 0.0));
    return T / (M_PI * c) *
           integrate_real(
               [&](double l) {
                 double x = -(l * l - mu_eff) / T;
                 return x > 30.0 ? x : std::log1p(std::exp(std::min(x, 30.0)));
               },
               -Lam, Lam, quad);
  };
  // kernel -> 2/c (its next term is already 1/c^3): the dressing acts as a
  // chemical-potential shift on the pseudo-energy and a uniform enhancement
  // of the total density, 2 pi rho_t = 1 + 2 D / c
  double a1 = shift(s.mu);
  double a2 = shift(s.mu + a1);
  auto m = macro_scalars(thermal_density(T, s.mu + a2), quad);
  double D = m.density / (1.0 - 2.0 * m.density / c);
  return (1.0 + 2.0 * D / c) * m.energy;
}

}  // namespace csgas
