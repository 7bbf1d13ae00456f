#include "csgas/cli.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "csgas/bethe.hpp"
#include "csgas/manybody.hpp"
#include "csgas/perturb.hpp"
#include "csgas/scatter.hpp"
#include "json.hpp"

namespace csgas {

namespace {

constexpr const char* kVersion = "csgas 1.0.0";

struct OptSpec {
  const char* key;
  const char* def;  // nullptr = required
  const char* help;
};

struct SubSpec {
  const char* name;
  const char* help;
  std::vector<OptSpec> opts;
};

const std::vector<SubSpec>& sub_table() {
  static const std::vector<SubSpec> table = {
      {"jump",
       "Solve the regularized two-particle problem and report the emergent "
       "discontinuity ratio jump/(2 slope) -> beta",
       {{"a", "0.001", "regulator width(s), comma-separated"},
        {"beta", nullptr, "coupling(s), comma-separated"},
        {"k", "1", "relative momentum(s), comma-separated"},
        {"regulator", "tanh", "profile: tanh or erf"}}},
      {"naive",
       "Negative control: the naive delta'-type regularization, whose jump "
       "closes as a -> 0",
       {{"a", "0.001", "regulator width(s), comma-separated"},
        {"beta", nullptr, "coupling(s), comma-separated"},
        {"k", "1", "relative momentum(s), comma-separated"},
        {"regulator", "tanh", "profile: tanh or erf"}}},
      {"perturb",
       "Energy-density orders e0, e1, e2 at fixed regulator width a.  The "
       "two-body vertex is expanded in the coupling beta at fixed a and the "
       "a -> 0 limit is taken only afterwards: e1 and e2 carry compensating "
       "1/a divergences (Parseval-equal coefficients) and only their sum has "
       "a finite limit, so sweep a downward rather than starting tiny.",
       {{"a", "0.01", "regulator width(s), comma-separated"},
        {"beta", nullptr, "coupling(s), comma-separated"},
        {"T", "1", "temperature of the thermal macro state"},
        {"mu", "1", "chemical potential of the thermal macro state"},
        {"kf", "0", "if > 0, use the zero-temperature sea with this Fermi "
                    "momentum instead of the thermal state"},
        {"regulator", "tanh", "profile: tanh or erf"},
        {"rel_tol", "1e-9", "quadrature relative tolerance"}}},
      {"selfenergy",
       "Second-order Matsubara self-energy Sigma(i omega_n, k); optionally "
       "also the finite-ring lattice oracle at matching momenta",
       {{"beta", nullptr, "coupling"},
        {"T", "1", "temperature"},
        {"mu", "1", "chemical potential"},
        {"k", "0", "momenta, comma-separated"},
        {"n", "0", "Matsubara indices (omega_n = 2 pi T (n + 1/2)), "
                   "comma-separated"},
        {"lattice_L", "0", "if > 0 with lattice_a: also evaluate the "
                           "finite-ring oracle on a ring of this length"},
        {"lattice_a", "0", "regulator width for the lattice oracle"},
        {"regulator", "tanh", "profile for the lattice oracle"},
        {"rel_tol", "1e-7", "quadrature relative tolerance"}}},
      {"spectral",
       "Spectral function A(omega, k) = -2 Im G^R on a rectangular grid; "
       "with --output a JSON metadata sidecar <output>.json is written",
       {{"beta", nullptr, "coupling"},
        {"T", "1", "temperature"},
        {"mu", "1", "chemical potential"},
        {"eta", "0.05", "analytic-continuation offset omega + i eta"},
        {"omega_min", "-4", "frequency grid start"},
        {"omega_max", "6", "frequency grid end"},
        {"n_omega", "101", "frequency grid points"},
        {"k_min", "0", "momentum grid start"},
        {"k_max", "3", "momentum grid end"},
        {"n_k", "7", "momentum grid points"},
        {"rel_tol", "1e-6", "quadrature relative tolerance"}}},
      {"sumrule",
       "Frequency integral int domega/2pi A(omega, k) per momentum "
       "(exact value 1), eta-extrapolated",
       {{"beta", nullptr, "coupling"},
        {"T", "1", "temperature"},
        {"mu", "1", "chemical potential"},
        {"k", "0,1,2", "momenta, comma-separated"},
        {"eta", "0.05", "base analytic-continuation offset"},
        {"rel_tol", "1e-6", "quadrature relative tolerance"}}},
      {"energy",
       "Galitskii-Migdal internal energy per volume vs the exact "
       "thermodynamic reference at c = 2/beta",
       {{"beta", "", "coupling(s), comma-separated (give this or c)"},
        {"c", "", "contact coupling(s) of the dual gas, comma-separated"},
        {"T", "1", "temperature"},
        {"mu", "1", "chemical potential"},
        {"rel_tol", "1e-7", "quadrature relative tolerance"},
        {"n_pts", "0", "rapidity grid points for the reference solver "
                       "(0 = default)"}}},
      {"bethe",
       "Finite-N Bethe roots on a ring of length L",
       {{"N", nullptr, "particle number"},
        {"L", nullptr, "ring length"},
        {"c", nullptr, "contact coupling"},
        {"I", "", "quantum numbers, comma-separated (default: ground state)"}}},
      {"tba",
       "Exact finite-temperature thermodynamics: pseudo-energy and root "
       "densities on the rapidity grid",
       {{"c", nullptr, "contact coupling"},
        {"T", "1", "temperature"},
        {"mu", "1", "chemical potential"},
        {"n_pts", "0", "rapidity grid points (0 = default)"}}},
      {"validate",
       "Run the quick invariant suite and print one PASS/FAIL line per "
       "property",
       {}},
  };
  return table;
}

std::vector<double> parse_list(const std::string& key, const std::string& v,
                               std::vector<std::string>* errs) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t pos = 0;
      double x = std::stod(item, &pos);
      while (pos < item.size() && std::isspace(item[pos])) ++pos;
      if (pos != item.size()) throw std::invalid_argument(item);
      out.push_back(x);
    } catch (const std::exception&) {
      errs->push_back(key + ": '" + item + "' is not a number");
      return out;
    }
  }
  if (out.empty()) errs->push_back(key + ": empty value");
  return out;
}

double parse_num(const std::string& key, const std::string& v,
                 std::vector<std::string>* errs) {
  auto xs = parse_list(key, v, errs);
  if (xs.size() > 1) errs->push_back(key + ": expected a single number");
  return xs.empty() ? 0.0 : xs[0];
}

int parse_int(const std::string& key, const std::string& v,
              std::vector<std::string>* errs) {
  double x = parse_num(key, v, errs);
  if (x != std::floor(x)) errs->push_back(key + ": expected an integer");
  return static_cast<int>(x);
}

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

void check(bool ok, const std::string& msg, std::vector<std::string>* errs) {
  if (!ok) errs->push_back(msg);
}

void throw_if_errors(const std::vector<std::string>& errs) {
  if (errs.empty()) return;
  std::string msg = "invalid configuration:";
  for (const auto& e : errs) msg += "\n  - " + e;
  throw ConfigError(msg);
}

void write_header(std::ostream& os, const RunConfig& cfg,
                  const std::string& columns) {
  os << "# " << kVersion << "\n";
  os << "# subcommand=" << cfg.subcommand << "\n";
  for (const auto& [k, v] : cfg.params) {
    if (k == "config" || k == "output") continue;
    os << "# " << k << "=" << v << "\n";
  }
  os << "# columns: " << columns << "\n";
}

struct Row {
  std::ostream& os;
  bool first = true;
  Row& operator<<(double x) {
    if (!first) os << ",";
    os << fmt(x);
    first = false;
    return *this;
  }
  Row& operator<<(const std::string& s) {
    if (!first) os << ",";
    os << s;
    first = false;
    return *this;
  }
  ~Row() { os << "\n"; }
};

// --- subcommand bodies ---------------------------------------------------

int run_jump(const RunConfig& cfg, std::ostream& os, bool naive) {
  std::vector<std::string> errs;
  auto as = parse_list("a", cfg.params.at("a"), &errs);
  auto betas = parse_list("beta", cfg.params.at("beta"), &errs);
  auto ks = parse_list("k", cfg.params.at("k"), &errs);
  const std::string reg_name = cfg.params.at("regulator");
  for (double a : as) check(a > 0.0, "a must be > 0", &errs);
  for (double b : betas) check(b > 0.0, "beta must be > 0", &errs);
  for (double k : ks) check(k > 0.0, "k must be > 0", &errs);
  RegulatorSpec reg =
      errs.empty() ? regulator_by_name(reg_name) : RegulatorSpec{};
  throw_if_errors(errs);

  write_header(os, cfg, "a,beta,k,ratio,phase_shift,residual,converged");
  int rc = 0;
  for (double a : as)
    for (double b : betas)
      for (double k : ks) {
        double ratio = NAN, phase = NAN, res = NAN;
        int ok = 1;
        try {
          PotentialParams p(a, b, reg);
          Wavefunction w = naive ? solve_naive(p, k) : solve_smooth(p, k);
          JumpReport jr = extract_jump(w, a, k);
          ratio = jr.ratio;
          phase = jr.phase_shift;
          res = jr.residual;
        } catch (const Error&) {
          ok = 0;
          rc = 2;
        }
        Row{os} << a << b << k << ratio << phase << res << double(ok);
      }
  return rc;
}

int run_perturb(const RunConfig& cfg, std::ostream& os) {
  std::vector<std::string> errs;
  auto as = parse_list("a", cfg.params.at("a"), &errs);
  auto betas = parse_list("beta", cfg.params.at("beta"), &errs);
  double T = parse_num("T", cfg.params.at("T"), &errs);
  double mu = parse_num("mu", cfg.params.at("mu"), &errs);
  double kf = parse_num("kf", cfg.params.at("kf"), &errs);
  double rel_tol = parse_num("rel_tol", cfg.params.at("rel_tol"), &errs);
  const std::string reg_name = cfg.params.at("regulator");
  for (double a : as) check(a > 0.0, "a must be > 0", &errs);
  for (double b : betas) check(b > 0.0, "beta must be > 0", &errs);
  check(T > 0.0, "T must be > 0", &errs);
  check(rel_tol > 0.0, "rel_tol must be > 0", &errs);
  RegulatorSpec reg =
      errs.empty() ? regulator_by_name(reg_name) : RegulatorSpec{};
  throw_if_errors(errs);

  QuadratureConfig q;
  q.rel_tol = rel_tol;
  RootDensity d = kf > 0.0 ? fermi_sea(kf) : thermal_density(T, mu);
  write_header(os, cfg,
               "a,beta,e0,e1,e2,e_closed,cancel_residual,converged");
  int rc = 0;
  for (double a : as)
    for (double b : betas) {
      EnergyOrders e{};
      int ok = 1;
      try {
        e = e_orders(PotentialParams(a, b, reg), d, q);
      } catch (const Error&) {
        ok = 0;
        rc = 2;
        e = {NAN, NAN, NAN, NAN, NAN};
      }
      Row{os} << a << b << e.e0 << e.e1 << e.e2 << e.e_closed
              << e.cancel_residual << double(ok);
    }
  return rc;
}

int run_selfenergy(const RunConfig& cfg, std::ostream& os) {
  std::vector<std::string> errs;
  double beta = parse_num("beta", cfg.params.at("beta"), &errs);
  double T = parse_num("T", cfg.params.at("T"), &errs);
  double mu = parse_num("mu", cfg.params.at("mu"), &errs);
  auto ks = parse_list("k", cfg.params.at("k"), &errs);
  auto ns = parse_list("n", cfg.params.at("n"), &errs);
  double lat_L = parse_num("lattice_L", cfg.params.at("lattice_L"), &errs);
  double lat_a = parse_num("lattice_a", cfg.params.at("lattice_a"), &errs);
  double rel_tol = parse_num("rel_tol", cfg.params.at("rel_tol"), &errs);
  const std::string reg_name = cfg.params.at("regulator");
  check(beta > 0.0, "beta must be > 0", &errs);
  check(T > 0.0, "T must be > 0", &errs);
  for (double n : ns)
    check(n == std::floor(n), "n must be integers", &errs);
  check((lat_L > 0.0) == (lat_a > 0.0),
        "lattice_L and lattice_a must be given together", &errs);
  RegulatorSpec reg =
      errs.empty() ? regulator_by_name(reg_name) : RegulatorSpec{};
  throw_if_errors(errs);

  QuadratureConfig q;
  q.rel_tol = rel_tol;
  ThermalState s{T, mu};
  const bool lattice = lat_L > 0.0;
  write_header(os, cfg,
               lattice ? "n,k,omega_n,re_sigma,im_sigma,k_lattice,"
                         "re_lattice,im_lattice,converged"
                       : "n,k,omega_n,re_sigma,im_sigma,converged");
  int rc = 0;
  for (double nd : ns)
    for (double k : ks) {
      int n = static_cast<int>(nd);
      double wn = 2.0 * M_PI * T * (n + 0.5);
      cdouble sig(NAN, NAN), lat(NAN, NAN);
      double k_lat = NAN;
      int ok = 1;
      try {
        sig = self_energy(cdouble(0.0, wn), k, s, beta, q);
        if (lattice) {
          int ki = static_cast<int>(std::lround(k * lat_L / (2.0 * M_PI)));
          k_lat = ki * 2.0 * M_PI / lat_L;
          VertexParams v{lat_L, lat_a, beta, reg, 0, 2};
          lat = self_energy_finite_L(n, ki, v, s);
        }
      } catch (const Error&) {
        ok = 0;
        rc = 2;
      }
      Row r{os};
      r << double(n) << k << wn << sig.real() << sig.imag();
      if (lattice) r << k_lat << lat.real() << lat.imag();
      r << double(ok);
    }
  return rc;
}

int run_spectral(const RunConfig& cfg, std::ostream& os,
                 const std::string& outpath) {
  std::vector<std::string> errs;
  double beta = parse_num("beta", cfg.params.at("beta"), &errs);
  double T = parse_num("T", cfg.params.at("T"), &errs);
  double mu = parse_num("mu", cfg.params.at("mu"), &errs);
  double eta = parse_num("eta", cfg.params.at("eta"), &errs);
  double w0 = parse_num("omega_min", cfg.params.at("omega_min"), &errs);
  double w1 = parse_num("omega_max", cfg.params.at("omega_max"), &errs);
  int nw = parse_int("n_omega", cfg.params.at("n_omega"), &errs);
  double k0 = parse_num("k_min", cfg.params.at("k_min"), &errs);
  double k1 = parse_num("k_max", cfg.params.at("k_max"), &errs);
  int nk = parse_int("n_k", cfg.params.at("n_k"), &errs);
  double rel_tol = parse_num("rel_tol", cfg.params.at("rel_tol"), &errs);
  check(beta >= 0.0, "beta must be >= 0", &errs);
  check(T > 0.0, "T must be > 0", &errs);
  check(eta > 0.0, "eta must be > 0", &errs);
  check(nw >= 2, "n_omega must be >= 2", &errs);
  check(nk >= 1, "n_k must be >= 1", &errs);
  check(w1 > w0, "omega_max must exceed omega_min", &errs);
  throw_if_errors(errs);

  QuadratureConfig q;
  q.rel_tol = rel_tol;
  q.eta = eta;
  ThermalState s{T, mu};
  Eigen::VectorXd omegas(nw), ks(nk);
  for (int i = 0; i < nw; ++i)
    omegas[i] = w0 + (w1 - w0) * i / (nw - 1);
  for (int j = 0; j < nk; ++j)
    ks[j] = nk == 1 ? k0 : k0 + (k1 - k0) * j / (nk - 1);

  write_header(os, cfg, "omega,k,re_sigma,im_sigma,a_val,converged");
  int rc = 0;
  try {
    SpectralGrid g = spectral_grid(omegas, ks, s, beta, q);
    for (int i = 0; i < nw; ++i)
      for (int j = 0; j < nk; ++j)
        Row{os} << omegas[i] << ks[j] << g.sigma(i, j).real()
                << g.sigma(i, j).imag() << g.a_vals(i, j) << 1.0;
  } catch (const Error&) {
    rc = 2;
    os << "# aborted: grid evaluation did not converge\n";
  }
  if (!outpath.empty()) {
    nlohmann::ordered_json meta;
    meta["tool"] = kVersion;
    meta["subcommand"] = "spectral";
    meta["T"] = T;
    meta["mu"] = mu;
    meta["beta"] = beta;
    meta["eta"] = eta;
    meta["rel_tol"] = rel_tol;
    meta["omega_grid"] = {{"min", w0}, {"max", w1}, {"points", nw}};
    meta["k_grid"] = {{"min", k0}, {"max", k1}, {"points", nk}};
    meta["columns"] = "omega,k,re_sigma,im_sigma,a_val,converged";
    std::ofstream jf(outpath + ".json");
    if (!jf) throw ConfigError("cannot open sidecar " + outpath + ".json");
    jf << meta.dump(2) << "\n";
  }
  return rc;
}

int run_sumrule(const RunConfig& cfg, std::ostream& os) {
  std::vector<std::string> errs;
  double beta = parse_num("beta", cfg.params.at("beta"), &errs);
  double T = parse_num("T", cfg.params.at("T"), &errs);
  double mu = parse_num("mu", cfg.params.at("mu"), &errs);
  double eta = parse_num("eta", cfg.params.at("eta"), &errs);
  auto ks = parse_list("k", cfg.params.at("k"), &errs);
  double rel_tol = parse_num("rel_tol", cfg.params.at("rel_tol"), &errs);
  check(beta >= 0.0, "beta must be >= 0", &errs);
  check(T > 0.0, "T must be > 0", &errs);
  check(eta > 0.0, "eta must be > 0", &errs);
  throw_if_errors(errs);

  QuadratureConfig q;
  q.rel_tol = rel_tol;
  q.eta = eta;
  ThermalState s{T, mu};
  write_header(os, cfg, "k,integral,deviation,converged");
  int rc = 0;
  for (double k : ks) {
    double v = NAN;
    int ok = 1;
    try {
      v = sum_rule(k, s, beta, q);
    } catch (const Error&) {
      ok = 0;
      rc = 2;
    }
    Row{os} << k << v << v - 1.0 << double(ok);
  }
  return rc;
}

int run_energy(const RunConfig& cfg, std::ostream& os) {
  std::vector<std::string> errs;
  double T = parse_num("T", cfg.params.at("T"), &errs);
  double mu = parse_num("mu", cfg.params.at("mu"), &errs);
  double rel_tol = parse_num("rel_tol", cfg.params.at("rel_tol"), &errs);
  int n_pts = parse_int("n_pts", cfg.params.at("n_pts"), &errs);
  std::vector<double> betas;
  const std::string& bv = cfg.params.at("beta");
  const std::string& cv = cfg.params.at("c");
  if (bv.empty() && cv.empty())
    errs.push_back("energy requires beta or c");
  if (!bv.empty() && !cv.empty())
    errs.push_back("give either beta or c, not both");
  if (!bv.empty()) betas = parse_list("beta", bv, &errs);
  if (!cv.empty())
    for (double c : parse_list("c", cv, &errs)) {
      check(c > 0.0, "c must be > 0", &errs);
      if (c > 0.0) betas.push_back(2.0 / c);
    }
  for (double b : betas) check(b > 0.0, "beta must be > 0", &errs);
  check(T > 0.0, "T must be > 0", &errs);
  throw_if_errors(errs);

  QuadratureConfig q;
  q.rel_tol = rel_tol;
  QuadratureConfig qy;
  qy.n_pts = n_pts;
  ThermalState s{T, mu};
  write_header(os, cfg, "beta,c,u_gm,u_yy,diff,converged");
  int rc = 0;
  for (double b : betas) {
    double u = NAN, uy = NAN;
    int ok = 1;
    try {
      u = internal_energy(s, b, q);
      uy = yang_yang_solve(s, 2.0 / b, qy).energy_density;
    } catch (const Error&) {
      ok = 0;
      rc = 2;
    }
    Row{os} << b << 2.0 / b << u << uy << u - uy << double(ok);
  }
  return rc;
}

int run_bethe(const RunConfig& cfg, std::ostream& os) {
  std::vector<std::string> errs;
  int N = parse_int("N", cfg.params.at("N"), &errs);
  double L = parse_num("L", cfg.params.at("L"), &errs);
  double c = parse_num("c", cfg.params.at("c"), &errs);
  std::vector<double> I;
  if (!cfg.params.at("I").empty())
    I = parse_list("I", cfg.params.at("I"), &errs);
  check(N >= 1, "N must be >= 1", &errs);
  check(L > 0.0, "L must be > 0", &errs);
  check(c > 0.0, "c must be > 0", &errs);
  throw_if_errors(errs);

  BetheState st = bethe_solve(N, L, c, I);
  write_header(os, cfg, "j,I,lambda,residual");
  os << "# energy=" << fmt(bethe_energy(st)) << "\n";
  os << "# momentum=" << fmt(bethe_momentum(st)) << "\n";
  os << "# iterations=" << st.iterations << "\n";
  for (int j = 0; j < N; ++j)
    Row{os} << double(j) << st.I[j] << st.roots[j] << st.residual;
  return 0;
}

int run_tba(const RunConfig& cfg, std::ostream& os) {
  std::vector<std::string> errs;
  double c = parse_num("c", cfg.params.at("c"), &errs);
  double T = parse_num("T", cfg.params.at("T"), &errs);
  double mu = parse_num("mu", cfg.params.at("mu"), &errs);
  int n_pts = parse_int("n_pts", cfg.params.at("n_pts"), &errs);
  check(c > 0.0, "c must be > 0", &errs);
  check(T > 0.0, "T must be > 0", &errs);
  throw_if_errors(errs);

  QuadratureConfig q;
  q.n_pts = n_pts;
  TBASolution sol = yang_yang_solve({T, mu}, c, q);
  write_header(os, cfg, "lambda,epsilon,rho,rho_t");
  os << "# energy_density=" << fmt(sol.energy_density) << "\n";
  os << "# particle_density=" << fmt(sol.particle_density) << "\n";
  os << "# pressure=" << fmt(sol.pressure) << "\n";
  for (int i = 0; i < sol.grid.size(); ++i)
    Row{os} << sol.grid[i] << sol.epsilon[i] << sol.rho[i] << sol.rho_t[i];
  return 0;
}

int run_validate(const RunConfig& cfg, std::ostream& os) {
  (void)cfg;
  int failures = 0;
  auto report = [&](const std::string& name, bool ok,
                    const std::string& detail) {
    os << (ok ? "PASS" : "FAIL") << ": " << name;
    if (!detail.empty()) os << "  (" << detail << ")";
    os << "\n";
    if (!ok) ++failures;
  };
  auto prop = [&](const std::string& name, auto&& body) {
    try {
      auto [ok, detail] = body();
      report(name, ok, detail);
    } catch (const std::exception& e) {
      report(name, false, e.what());
    }
  };
  using R = std::pair<bool, std::string>;

  prop("quadrature reproduces a closed-form integral", [&]() -> R {
    double v = integrate_real([](double x) { return std::sin(x); }, 0.0,
                              M_PI, {});
    return {std::abs(v - 2.0) < 1e-12, "int sin = " + fmt(v)};
  });
  prop("divergence coefficients agree (Parseval), both profiles", [&]() -> R {
    RootDensity d = thermal_density(1.0, 1.0);
    double worst = 0.0;
    for (const char* r : {"tanh", "erf"}) {
      auto [c1, c2] =
          divergence_coefficients(PotentialParams(0.02, 0.1, regulator_by_name(r)), d);
      worst = std::max(worst, std::abs(c1 + c2) / std::abs(c1));
    }
    return {worst < 1e-8, "rel mismatch " + fmt(worst)};
  });
  prop("discontinuity ratio approaches beta", [&]() -> R {
    PotentialParams p(2e-3, 0.5, tanh_regulator());
    auto jr = extract_jump(solve_smooth(p, 1.0), p.a, 1.0);
    double err = std::abs(jr.ratio - 0.5) / 0.5;
    return {err < 0.05, "rel err " + fmt(err)};
  });
  prop("naive regularization closes the jump", [&]() -> R {
    PotentialParams p(1e-3, 0.5, tanh_regulator());
    auto jr = extract_jump(solve_naive(p, 1.0), p.a, 1.0);
    return {std::abs(jr.ratio) < 0.02, "ratio " + fmt(jr.ratio)};
  });
  prop("first-order self-energy closed form", [&]() -> R {
    ThermalState s{1.0, 1.0};
    double a = self_energy_first_order(s, 0.4, 0.7);
    double b = self_energy_first_order_direct(s, 0.4, 0.7);
    return {std::abs(a - b) <= 1e-8 * std::abs(a), "diff " + fmt(a - b)};
  });
  prop("self-energy conjugation symmetry", [&]() -> R {
    ThermalState s{1.0, 1.0};
    QuadratureConfig q;
    q.rel_tol = 1e-7;
    cdouble z(0.7, 0.3);
    cdouble d = self_energy(std::conj(z), 0.8, s, 0.5, q) -
                std::conj(self_energy(z, 0.8, s, 0.5, q));
    return {std::abs(d) < 1e-12, "diff " + fmt(std::abs(d))};
  });
  prop("free spectral function is the eta Lorentzian", [&]() -> R {
    ThermalState s{1.0, 1.0};
    QuadratureConfig q;
    q.eta = 0.05;
    double om = 0.4, k = 0.9, xi = k * k - s.mu;
    double expect = 2.0 * q.eta / (std::pow(om - xi, 2) + q.eta * q.eta);
    double got = spectral(om, k, s, 0.0, q);
    return {std::abs(got - expect) < 1e-10 * expect, ""};
  });
  prop("free-gas sum rule", [&]() -> R {
    ThermalState s{1.0, 1.0};
    QuadratureConfig q;
    q.eta = 0.05;
    double v = sum_rule(1.0, s, 0.0, q);
    return {std::abs(v - 1.0) < 2e-3, "integral " + fmt(v)};
  });
  prop("Bethe roots reach the free limit at huge coupling", [&]() -> R {
    auto st = bethe_solve(4, 10.0, 1e6);
    double worst = 0.0;
    for (int j = 0; j < 4; ++j)
      worst = std::max(
          worst, std::abs(st.roots[j] - 2.0 * M_PI * (j - 1.5) / 10.0));
    return {worst < 1e-5, "max dev " + fmt(worst)};
  });
  prop("thermodynamics reduces to free fermions at huge coupling",
       [&]() -> R {
         auto sol = yang_yang_solve({1.0, 1.0}, 1e6);
         auto m = macro_scalars(thermal_density(1.0, 1.0));
         double err = std::abs(sol.energy_density - m.energy) +
                      std::abs(sol.particle_density - m.density);
         return {err < 1e-4, "err " + fmt(err)};
       });
  prop("perturbative orders close on the compact energy expression",
       [&]() -> R {
         RootDensity d = thermal_density(1.0, 1.0);
         auto m = macro_scalars(d);
         auto e = e_orders(PotentialParams(0.02, 0.1, tanh_regulator()), d);
         double tol = 3.0 * 0.02 * std::abs(m.energy);
         return {std::abs(e.cancel_residual) < tol,
                 "residual " + fmt(e.cancel_residual)};
       });

  os << (failures == 0 ? "ALL CHECKS PASSED\n"
                       : fmt(failures) + " CHECK(S) FAILED\n");
  return failures == 0 ? 0 : 2;
}

}  // namespace

RunConfig parse_config(const std::vector<std::string>& args) {
  CLI::App app{"Weak-coupling regularization of the dual point-interaction "
               "gas: scattering, perturbative energies, self-energy, "
               "spectral functions, and exact thermodynamic references"};
  app.name("csgas");
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // node-stable storage for option targets
  std::map<std::string, std::map<std::string, std::string>> storage;
  for (const auto& ss : sub_table()) {
    CLI::App* sub = app.add_subcommand(ss.name, ss.help);
    auto& store = storage[ss.name];
    for (const auto& o : ss.opts) {
      store[o.key] = o.def ? o.def : "";
      CLI::Option* opt =
          sub->add_option("--" + std::string(o.key), store[o.key], o.help);
      if (!o.def) opt->required();
      opt->capture_default_str();
    }
    store["output"] = "";
    sub->add_option("--output,-o", store["output"],
                    "write CSV here instead of stdout");
    sub->add_option("--config", store["config"],
                    "flat key=value file; explicit flags take precedence")
        ->group("");  // consumed before parsing; listed for help only
    for (auto* opt : sub->get_options())
      if (opt->get_expected_min() > 0)
        opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  }

  // Pre-parse pass: expand `--config FILE` into flags placed right after the
  // subcommand, so explicit flags (later tokens, TakeLast) override the file.
  std::vector<std::string> cfg_flags, rest;
  for (size_t i = 0; i < args.size(); ++i) {
    std::string file;
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw ConfigError("--config needs a file");
      file = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      file = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
      continue;
    }
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot read config file " + file);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      size_t b = line.find_first_not_of(" \t");
      if (b == std::string::npos || line[b] == '#') continue;
      size_t e = line.find_last_not_of(" \t\r");
      line = line.substr(b, e - b + 1);
      size_t eq = line.find('=');
      if (eq == std::string::npos || eq == 0)
        throw ConfigError(file + ":" + std::to_string(lineno) +
                          ": expected key=value, got '" + line + "'");
      cfg_flags.push_back("--" + line);
    }
  }
  std::vector<std::string> expanded;
  if (rest.empty()) {
    expanded = cfg_flags;
  } else {
    expanded.push_back(rest.front());
    expanded.insert(expanded.end(), cfg_flags.begin(), cfg_flags.end());
    expanded.insert(expanded.end(), rest.begin() + 1, rest.end());
  }

  std::vector<std::string> rev(expanded.rbegin(), expanded.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    RunConfig cfg;
    cfg.subcommand = "help";
    cfg.params["text"] = app.help();
    return cfg;
  } catch (const CLI::CallForVersion&) {
    RunConfig cfg;
    cfg.subcommand = "help";
    cfg.params["text"] = std::string(kVersion) + "\n";
    return cfg;
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }

  CLI::App* sub = app.get_subcommands().front();
  RunConfig cfg;
  cfg.subcommand = sub->get_name();
  cfg.params = storage[cfg.subcommand];
  return cfg;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.subcommand == "help") {
    out << cfg.params.at("text");
    return 0;
  }
  std::ostringstream body;
  int rc;
  if (cfg.subcommand == "jump")
    rc = run_jump(cfg, body, false);
  else if (cfg.subcommand == "naive")
    rc = run_jump(cfg, body, true);
  else if (cfg.subcommand == "perturb")
    rc = run_perturb(cfg, body);
  else if (cfg.subcommand == "selfenergy")
    rc = run_selfenergy(cfg, body);
  else if (cfg.subcommand == "spectral")
    rc = run_spectral(cfg, body, cfg.params.at("output"));
  else if (cfg.subcommand == "sumrule")
    rc = run_sumrule(cfg, body);
  else if (cfg.subcommand == "energy")
    rc = run_energy(cfg, body);
  else if (cfg.subcommand == "bethe")
    rc = run_bethe(cfg, body);
  else if (cfg.subcommand == "tba")
    rc = run_tba(cfg, body);
  else if (cfg.subcommand == "validate")
    rc = run_validate(cfg, body);
  else
    throw ConfigError("unknown subcommand '" + cfg.subcommand + "'");

  const std::string& path =
      cfg.params.count("output") ? cfg.params.at("output") : "";
  if (!path.empty()) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open output file " + path);
    f << body.str();
  } else {
    out << body.str();
  }
  if (rc == 2) err << "warning: some points did not converge\n";
  return rc;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    RunConfig cfg = parse_config(args);
    return run(cfg, std::cout, std::cerr);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace csgas
