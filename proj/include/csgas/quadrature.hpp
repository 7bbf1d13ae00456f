#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <queue>
#include <vector>

#include "csgas/errors.hpp"

namespace csgas {

// Tolerances and cutoffs shared by the quadrature-backed operations.
struct QuadratureConfig {
  double rel_tol = 1e-9;
  double abs_tol = 1e-13;
  int max_intervals = 4000;
  double lambda_cut = 0.0;  // momentum cutoff; 0 = choose automatically
  int n_pts = 0;            // panel count hint for fixed grids; 0 = default
  double eta = 0.05;        // analytic continuation offset (omega + i eta)
  double pv_radius = 0.5;   // exclusion radius for principal values
};

namespace detail {

inline double mag(double x) { return std::abs(x); }
inline double mag(const std::complex<double>& z) { return std::abs(z); }

// Gauss-Kronrod 15(7) nodes on [0,1] side (symmetric).
inline constexpr double kGK15Nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};
inline constexpr double kGK15WeightsK[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
inline constexpr double kGK15WeightsG[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

template <typename T, typename F>
void gk15(const F& f, double a, double b, T& result, double& err) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  T sk{};
  T sg{};
  for (int i = 0; i < 8; ++i) {
    T v;
    if (i == 7) {
      v = f(c);
    } else {
      v = f(c - h * kGK15Nodes[i]);
      v += f(c + h * kGK15Nodes[i]);
    }
    sk += kGK15WeightsK[i] * v;
    if (i % 2 == 1) sg += kGK15WeightsG[i / 2] * v;
  }
  result = h * sk;
  err = mag(h * (sk - sg));
  // Sharpen the raw |K-G| estimate the usual way.
  err = std::pow(200.0 * err, 1.5);
  double scale = mag(result);
  if (scale > 0.0 && err > scale) err = scale;
}

struct Interval {
  double a, b, err;
  bool operator<(const Interval& o) const { return err < o.err; }
};

}  // namespace detail

// Adaptive Gauss-Kronrod integration over [a,b].  `seeds` lists interior
// points at which the initial panels are split (pole locations, peak
// positions); panels are bisected worst-error-first.
template <typename T, typename F>
T integrate(const F& f, double a, double b, const QuadratureConfig& q = {},
            const std::vector<double>& seeds = {}) {
  if (a == b) return T{};
  std::vector<double> pts;
  pts.push_back(a);
  for (double s : seeds)
    if (s > a && s < b) pts.push_back(s);
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());

  struct Node {
    double a, b, err;
    T val;
  };
  std::vector<Node> store;
  // heap of (err, index into store); split worst first
  auto cmp = [&](size_t i, size_t j) { return store[i].err < store[j].err; };
  std::priority_queue<size_t, std::vector<size_t>, decltype(cmp)> heap(cmp);
  T total{};
  double total_err = 0.0;
  auto push = [&](double x0, double x1) {
    T r;
    double e;
    detail::gk15(f, x0, x1, r, e);
    total += r;
    total_err += e;
    store.push_back({x0, x1, e, r});
    heap.push(store.size() - 1);
  };
  for (size_t i = 0; i + 1 < pts.size(); ++i) push(pts[i], pts[i + 1]);

  int n = static_cast<int>(store.size());
  while (n < q.max_intervals) {
    double goal = std::max(q.abs_tol, q.rel_tol * detail::mag(total));
    if (total_err <= goal) break;
    size_t wi = heap.top();
    heap.pop();
    Node worst = store[wi];
    store[wi].err = 0.0;  // parent retired; children take over its share
    total -= worst.val;
    total_err -= worst.err;
    double m = 0.5 * (worst.a + worst.b);
    push(worst.a, m);
    push(m, worst.b);
    n += 1;
  }
  double goal = std::max(q.abs_tol, q.rel_tol * detail::mag(total));
  if (total_err > 100.0 * goal)
    throw QuadratureNotConverged("adaptive quadrature: error " +
                                 std::to_string(total_err) + " > goal " +
                                 std::to_string(goal));
  return total;
}

template <typename F>
double integrate_real(const F& f, double a, double b,
                      const QuadratureConfig& q = {},
                      const std::vector<double>& seeds = {}) {
  return integrate<double>(f, a, b, q, seeds);
}

// PV of int_a^b g(x)/(x-x0) dx with x0 strictly inside (a,b).  The interval
// |x-x0|<r is folded symmetrically, which removes the singularity exactly for
// any r; two radii are evaluated as a consistency check.
template <typename T, typename F>
T pv_integrate(const F& g, double x0, double a, double b, double radius,
               const QuadratureConfig& q = {},
               const std::vector<double>& seeds = {}) {
  double r = std::min({radius, 0.5 * (x0 - a), 0.5 * (b - x0)});
  if (!(r > 0.0)) throw PVUnstable("pv_integrate: pole not interior");
  // `gross` tracks the unsigned size of the pieces; the net value can be far
  // smaller through cancellation, so consistency is judged against gross.
  double gross = 0.0;
  auto eval = [&](double rr) {
    auto whole = [&](double x) { return g(x) / (x - x0); };
    T left = integrate<T>(whole, a, x0 - rr, q, seeds);
    T right = integrate<T>(whole, x0 + rr, b, q, seeds);
    auto folded = [&](double t) { return (g(x0 + t) - g(x0 - t)) / t; };
    T fold = integrate<T>(folded, 0.0, rr, q);
    gross = std::max(gross, detail::mag(left) + detail::mag(right) +
                                detail::mag(fold));
    return left + right + fold;
  };
  T v1 = eval(r);
  T v2 = eval(0.5 * r);
  double tol = 1000.0 * (std::max(q.rel_tol, 1e-7) * std::max(gross, 1e-300) +
                         q.abs_tol);
  if (detail::mag(v1 - v2) > tol)
    throw PVUnstable("pv_integrate: exclusion radii disagree");
  return v2;
}

// Gauss-Legendre nodes and weights on [a,b] (Newton on the recurrence).
inline std::vector<std::pair<double, double>> gauss_legendre(int n, double a,
                                                             double b) {
  std::vector<std::pair<double, double>> out(n);
  const double xm = 0.5 * (b + a), xl = 0.5 * (b - a);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2 * j + 1) * x * p1 - j * p2) / (j + 1);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double w = 2.0 * xl / ((1.0 - x * x) * pp * pp);
    out[i] = {xm - xl * x, w};
    out[n - 1 - i] = {xm + xl * x, w};
  }
  return out;
}

// Cubic-Hermite table on a uniform grid; slopes from 4th-order central
// differences.  Used to cache expensive transforms (F, G, Vhat).
class UniformTable {
 public:
  UniformTable() = default;
  UniformTable(double x0, double dx, std::vector<double> values)
      : x0_(x0), dx_(dx), v_(std::move(values)) {
    size_t n = v_.size();
    d_.resize(n);
    auto one_sided = [&](size_t i, long s) {
      // 4th-order forward (s=+1) / backward (s=-1) difference
      return s *
             (-25.0 * v_[i] + 48.0 * v_[i + s] - 36.0 * v_[i + 2 * s] +
              16.0 * v_[i + 3 * s] - 3.0 * v_[i + 4 * s]) /
             12.0;
    };
    auto lopsided = [&](size_t i, long s) {
      // 4th-order, one node on the short side
      return s *
             (-3.0 * v_[i - s] - 10.0 * v_[i] + 18.0 * v_[i + s] -
              6.0 * v_[i + 2 * s] + v_[i + 3 * s]) /
             12.0;
    };
    for (size_t i = 0; i < n; ++i) {
      if (i >= 2 && i + 2 < n) {
        d_[i] = (v_[i - 2] - 8 * v_[i - 1] + 8 * v_[i + 1] - v_[i + 2]) / 12.0;
      } else if (n >= 5 && i == 0) {
        d_[i] = one_sided(i, 1);
      } else if (n >= 5 && i == 1) {
        d_[i] = lopsided(i, 1);
      } else if (n >= 5 && i == n - 1) {
        d_[i] = one_sided(i, -1);
      } else if (n >= 5 && i == n - 2) {
        d_[i] = lopsided(i, -1);
      } else if (i >= 1 && i + 1 < n) {
        d_[i] = 0.5 * (v_[i + 1] - v_[i - 1]);
      } else if (i + 1 < n) {
        d_[i] = v_[i + 1] - v_[i];
      } else {
        d_[i] = v_[i] - v_[i - 1];
      }
    }
  }

  bool empty() const { return v_.empty(); }
  double x_min() const { return x0_; }
  double x_max() const { return x0_ + dx_ * (v_.size() - 1); }

  double operator()(double x) const {
    double s = (x - x0_) / dx_;
    auto n = static_cast<long>(v_.size());
    long i = static_cast<long>(std::floor(s));
    if (i < 0) i = 0;
    if (i > n - 2) i = n - 2;
    double t = s - i;
    double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
    double h10 = t * (1 - t) * (1 - t);
    double h01 = t * t * (3 - 2 * t);
    double h11 = t * t * (t - 1);
    return h00 * v_[i] + h10 * d_[i] + h01 * v_[i + 1] + h11 * d_[i + 1];
  }

 private:
  double x0_ = 0.0, dx_ = 1.0;
  std::vector<double> v_, d_;
};

}  // namespace csgas
