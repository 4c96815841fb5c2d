#include "predprey/ode.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "predprey/errors.hpp"
#include "predprey/io.hpp"
#include "predprey/quadrature.hpp"

namespace predprey {

LimitSystem::LimitSystem(ResponseModel model, std::optional<double> linear_phi_slope)
    : model_(std::move(model)), prey_net_(model_.rates().prey_net()), slope_(linear_phi_slope) {}

// Registered closed forms are preferred; the quadrature path is the fallback.
Vec2 rhs(const LimitSystem& sys, double x, double y) {
  const auto& m = sys.model();
  const auto& cf = m.closed();
  const double f = cf.phi && m.x_range().contains(x) ? cf.phi(x) : phi(m, x);
  const double g = cf.psi && m.x_range().contains(x) ? cf.psi(x) : psi(m, x);
  return {sys.prey_net() * x - y * f, y * g};
}

double lipschitz_probe(const LimitSystem& sys, double x_lo, double x_hi, double y_max,
                       std::size_t n) {
  if (n < 2) n = 2;
  std::vector<Vec2> pts;
  std::vector<Vec2> vals;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = x_lo + (x_hi - x_lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
      const double y = y_max * static_cast<double>(j) / static_cast<double>(n - 1);
      pts.push_back({x, y});
      vals.push_back(rhs(sys, x, y));
    }
  }
  double worst = 0.0;
  // Neighbours along both grid directions.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t p = i * n + j;
      for (std::size_t q : {i + 1 < n ? p + n : p, j + 1 < n ? p + 1 : p}) {
        if (q == p) continue;
        const double dx = std::hypot(pts[p][0] - pts[q][0], pts[p][1] - pts[q][1]);
        const double df = std::hypot(vals[p][0] - vals[q][0], vals[p][1] - vals[q][1]);
        worst = std::max(worst, df / dx);
      }
    }
  }
  return worst;
}

// ---- Dormand–Prince 5(4) ---------------------------------------------------

namespace {

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

Vec2 axpy(const Vec2& y, double h, std::initializer_list<std::pair<double, const Vec2*>> terms) {
  Vec2 out = y;
  for (const auto& [c, k] : terms) {
    out[0] += h * c * (*k)[0];
    out[1] += h * c * (*k)[1];
  }
  return out;
}

}  // namespace

Vec2 DenseStep::eval(double t) const {
  const double th = h > 0.0 ? std::clamp((t - t0) / h, 0.0, 1.0) : 0.0;
  const double s1 = 1.0 - th;
  Vec2 out;
  for (int i = 0; i < 2; ++i) {
    out[i] = r[0][i] + th * (r[1][i] + s1 * (r[2][i] + th * (r[3][i] + s1 * r[4][i])));
  }
  return out;
}

Vec2 OdeSolution::at(double tq) const {
  if (steps.empty()) {
    if (!t.empty()) return {x.front(), y.front()};
    throw ContractError("empty ODE solution");
  }
  if (tq < steps.front().t0 || tq > t_end) throw DomainError("time outside the integrated interval");
  auto it = std::upper_bound(steps.begin(), steps.end(), tq,
                             [](double v, const DenseStep& s) { return v < s.t0; });
  if (it != steps.begin()) --it;
  return it->eval(tq);
}

double OdeSolution::max_conservation_drift() const {
  double d = 0.0;
  for (double v : conservation) d = std::max(d, std::abs(v - conservation.front()));
  return d;
}

std::string OdeSolution::to_csv() const {
  const bool with_l = !conservation.empty();
  std::string out = with_l ? "t,x,y,conservation\n" : "t,x,y\n";
  for (std::size_t i = 0; i < t.size(); ++i) {
    out += io::format_double(t[i]) + ',' + io::format_double(x[i]) + ',' + io::format_double(y[i]);
    if (with_l) out += ',' + io::format_double(conservation[i]);
    out += '\n';
  }
  return out;
}

OdeSolution integrate(const LimitSystem& sys, double x0, double y0, double T,
                      const OdeOptions& options) {
  if (!(x0 > 0.0) || !(y0 >= 0.0)) throw ConfigError("ODE initial data needs x0 > 0 and y0 >= 0");
  if (!(T > 0.0)) throw ConfigError("ODE horizon T must be positive");
  if (!(options.rel_tol > 0.0) || !(options.abs_tol >= 0.0)) {
    throw ConfigError("ODE tolerances must be positive");
  }
  if (options.conservation && !sys.linear_phi_slope()) {
    throw ContractError("conservation law requires a linear functional response");
  }
  const bool y_positive = y0 > 0.0;
  const auto& range = sys.model().x_range();
  const auto admissible = [&](const Vec2& v) {
    return std::isfinite(v[0]) && std::isfinite(v[1]) && v[0] > 0.0 && range.contains(v[0]) &&
           (y_positive ? v[1] > 0.0 : v[1] >= 0.0);
  };

  OdeSolution sol;
  const double rtol = options.rel_tol;
  const double atol = options.abs_tol;
  const auto err_norm = [&](const Vec2& e, const Vec2& ya, const Vec2& yb) {
    double s = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double sc = atol + rtol * std::max(std::abs(ya[i]), std::abs(yb[i]));
      s += (e[i] / sc) * (e[i] / sc);
    }
    return std::sqrt(0.5 * s);
  };

  Vec2 y = {x0, y0};
  double t = 0.0;
  Vec2 k1 = rhs(sys, y[0], y[1]);
  double h = options.h_init;
  if (!(h > 0.0)) {
    const double d0 = std::hypot(y[0], y[1]);
    const double d1n = std::hypot(k1[0], k1[1]);
    h = (d1n > 1e-12 && d0 > 1e-12) ? 0.01 * d0 / d1n : 1e-3;
    h = std::min({h, 0.1 * T, 1.0});
  }

  std::size_t steps_taken = 0;
  while (t < T) {
    if (steps_taken++ >= options.max_steps) {
      sol.aborted = true;
      sol.message = "step budget exhausted";
      break;
    }
    if (t + h > T) h = T - t;
    if (h < 1e-14 * std::max(1.0, std::abs(t))) {
      sol.aborted = true;
      std::ostringstream os;
      os << "step size collapsed at t = " << t << " (x = " << y[0] << ", y = " << y[1] << ")";
      sol.message = os.str();
      break;
    }
    bool ok = true;
    Vec2 k2, k3, k4, k5, k6, k7, y1;
    try {
      const auto stage = [&](const Vec2& v) {
        if (!admissible(v)) throw DomainError("stage left the admissible region");
        return rhs(sys, v[0], v[1]);
      };
      k2 = stage(axpy(y, h, {{a21, &k1}}));
      k3 = stage(axpy(y, h, {{a31, &k1}, {a32, &k2}}));
      k4 = stage(axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
      k5 = stage(axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
      k6 = stage(axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
      y1 = axpy(y, h, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
      k7 = stage(y1);
    } catch (const DomainError&) {
      ok = false;
    }
    if (!ok) {
      ++sol.rejected;
      h *= 0.25;
      continue;
    }
    Vec2 e;
    for (int i = 0; i < 2; ++i) {
      e[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    }
    const double err = err_norm(e, y, y1);
    if (!(err <= 1.0)) {
      ++sol.rejected;
      h *= std::max(0.2, 0.9 * std::pow(std::isfinite(err) ? err : 1e10, -0.2));
      continue;
    }
    DenseStep ds;
    ds.t0 = t;
    ds.h = h;
    for (int i = 0; i < 2; ++i) {
      const double ydiff = y1[i] - y[i];
      const double bspl = h * k1[i] - ydiff;
      ds.r[0][i] = y[i];
      ds.r[1][i] = ydiff;
      ds.r[2][i] = bspl;
      ds.r[3][i] = ydiff - h * k7[i] - bspl;
      ds.r[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
    }
    sol.steps.push_back(ds);
    sol.step_errors.push_back(err);
    t = (t + h >= T) ? T : t + h;
    y = y1;
    k1 = k7;
    const double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 10.0;
    h *= std::clamp(fac, 0.2, 10.0);
  }
  sol.t_end = t;

  std::vector<double> grid = options.grid;
  if (grid.empty()) {
    for (int i = 0; i <= 200; ++i) grid.push_back(T * i / 200.0);
    grid.back() = T;
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i > 0 && !(grid[i] > grid[i - 1])) throw ConfigError("ODE output grid must increase strictly");
    if (grid[i] < 0.0 || grid[i] > T) throw ConfigError("ODE output grid must lie in [0, T]");
  }
  for (double tq : grid) {
    if (tq > sol.t_end) break;
    const Vec2 v = sol.steps.empty() ? Vec2{x0, y0} : sol.at(tq);
    sol.t.push_back(tq);
    sol.x.push_back(v[0]);
    sol.y.push_back(v[1]);
    if (options.conservation) sol.conservation.push_back(conservation(sys, v[0], v[1]));
  }
  return sol;
}

double conservation(const LimitSystem& sys, double x, double y) {
  const auto& c = sys.linear_phi_slope();
  if (!c) throw ContractError("conservation law requires a linear functional response");
  if (!(x > 0.0) || !(y > 0.0)) throw DomainError("conservation law needs x, y > 0");
  const double u = std::log(x);
  double inner;
  if (sys.model().closed().psi_log_integral) {
    inner = sys.model().closed().psi_log_integral(u);
  } else {
    const auto f = [&sys](double s) { return psi(sys.model(), std::exp(s)); };
    inner = u >= 1.0 ? quad::integrate(f, 1.0, u) : -quad::integrate(f, u, 1.0);
  }
  return sys.prey_net() * std::log(y) - *c * y - inner;
}

Eigenvalues eigenvalues(const Mat2& m) {
  const double tr = m[0][0] + m[1][1];
  const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  const std::complex<double> disc = std::sqrt(std::complex<double>(tr * tr / 4.0 - det, 0.0));
  const std::complex<double> l1 = tr / 2.0 + disc;
  const std::complex<double> l2 = tr / 2.0 - disc;
  return {{l1.real(), l2.real()}, {l1.imag(), l2.imag()}};
}

namespace {

double central_diff(const std::function<double(double)>& f, double x, const DensityRange& range) {
  const double h = 1e-6 * (1.0 + std::abs(x));
  double lo = x - h, hi = x + h;
  if (lo < range.lo) lo = x;
  if (hi > range.hi) hi = x;
  return (f(hi) - f(lo)) / (hi - lo);
}

}  // namespace

Mat2 jacobian(const LimitSystem& sys, double x, double y, JacobianMode mode) {
  const auto& model = sys.model();
  const auto& range = model.x_range();
  if (!range.contains(x)) throw DomainError("prey density outside the model range");
  if (mode == JacobianMode::FiniteDifference) {
    const double hx = 1e-6 * (1.0 + std::abs(x));
    const double hy = 1e-6 * (1.0 + std::abs(y));
    double xl = x - hx, xh = x + hx;
    if (xl < range.lo) xl = x;
    if (xh > range.hi) xh = x;
    const Vec2 fxh = rhs(sys, xh, y), fxl = rhs(sys, xl, y);
    const Vec2 fyh = rhs(sys, x, y + hy), fyl = rhs(sys, x, y - hy);
    Mat2 m;
    for (int i = 0; i < 2; ++i) {
      m[i][0] = (fxh[i] - fxl[i]) / (xh - xl);
      m[i][1] = (fyh[i] - fyl[i]) / (2.0 * hy);
    }
    return m;
  }
  const auto& cf = model.closed();
  const auto phi_fn = [&model](double v) { return phi(model, v); };
  const auto psi_fn = [&model](double v) { return psi(model, v); };
  const double dphi = cf.dphi ? cf.dphi(x) : central_diff(phi_fn, x, range);
  const double dpsi = cf.dpsi ? cf.dpsi(x) : central_diff(psi_fn, x, range);
  return {{{sys.prey_net() - y * dphi, -phi(model, x)}, {y * dpsi, psi(model, x)}}};
}

nlohmann::json Equilibrium::to_json() const {
  return {{"x", x},
          {"y", y},
          {"jacobian", {{jacobian[0][0], jacobian[0][1]}, {jacobian[1][0], jacobian[1][1]}}},
          {"eigenvalues",
           {{{"re", eig.re[0]}, {"im", eig.im[0]}}, {{"re", eig.re[1]}, {"im", eig.im[1]}}}},
          {"rhs_norm", rhs_norm}};
}

std::optional<Equilibrium> find_equilibrium(const LimitSystem& sys, double x_lo, double x_hi) {
  const auto& model = sys.model();
  if (!(x_lo < x_hi)) throw ConfigError("equilibrium bracket must satisfy x_lo < x_hi");
  const auto f = [&model](double v) { return psi(model, v); };
  const double flo = f(x_lo);
  const double fhi = f(x_hi);
  double root;
  if (flo == 0.0) {
    root = x_lo;
  } else if (fhi == 0.0) {
    root = x_hi;
  } else if ((flo < 0.0) == (fhi < 0.0)) {
    return std::nullopt;
  } else {
    std::uintmax_t iters = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(
        f, x_lo, x_hi, flo, fhi, boost::math::tools::eps_tolerance<double>(50), iters);
    root = 0.5 * (a + b);
  }
  Equilibrium eq;
  eq.x = root;
  eq.y = sys.prey_net() * root / phi(model, root);
  eq.jacobian = jacobian(sys, eq.x, eq.y, JacobianMode::Analytic);
  eq.eig = eigenvalues(eq.jacobian);
  const Vec2 r = rhs(sys, eq.x, eq.y);
  eq.rhs_norm = std::hypot(r[0], r[1]);
  return eq;
}

std::optional<double> detect_period(const OdeSolution& sol, double tol) {
  if (sol.steps.empty()) return std::nullopt;
  const Vec2 start = sol.steps.front().r[0];
  // Section through the start, transversal to the initial velocity.
  const DenseStep& s0 = sol.steps.front();
  const Vec2 v0 = {s0.eval(s0.t0 + 1e-3 * s0.h)[0] - start[0], s0.eval(s0.t0 + 1e-3 * s0.h)[1] - start[1]};
  const int comp = std::abs(v0[0]) >= std::abs(v0[1]) ? 0 : 1;
  const double dir = v0[comp] > 0.0 ? 1.0 : -1.0;
  const auto g = [&](double t) { return dir * (sol.at(t)[comp] - start[comp]); };
  const auto dist = [&](double t) {
    const Vec2 p = sol.at(t);
    return std::hypot(p[0] - start[0], p[1] - start[1]);
  };

  bool left = false;
  for (const auto& st : sol.steps) {
    const double ta = st.t0;
    const double tb = std::min(st.t0 + st.h, sol.t_end);
    if (!left) {
      if (dist(tb) > tol) left = true;
      continue;
    }
    const double ga = g(ta);
    const double gb = g(tb);
    if (ga < 0.0 && gb >= 0.0) {
      double a = ta, b = tb;
      if (gb == 0.0) {
        a = b;
      } else {
        std::uintmax_t iters = 200;
        const auto [lo, hi] = boost::math::tools::toms748_solve(
            g, ta, tb, ga, gb, boost::math::tools::eps_tolerance<double>(50), iters);
        a = lo;
        b = hi;
      }
      const double tc = 0.5 * (a + b);
      if (dist(tc) <= tol) return tc;
    }
  }
  return std::nullopt;
}

}  // namespace predprey
