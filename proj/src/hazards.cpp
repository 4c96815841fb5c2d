#include "predprey/hazards.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include <boost/math/special_functions/erf.hpp>

#include "predprey/errors.hpp"
#include "predprey/quadrature.hpp"

namespace predprey {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

const double kLogTail = -std::log(InteractionLaw::kTailSurvival);

// ---- standard normal tail helpers ------------------------------------------

double log_phi(double z) {
  return -0.5 * z * z - 0.5 * std::log(2.0 * std::numbers::pi);
}

// log P(N > z)
double log_q(double z) {
  if (z < 0.0) return std::log1p(-0.5 * std::erfc(-z / std::numbers::sqrt2));
  if (z < 37.0) return std::log(0.5 * std::erfc(z / std::numbers::sqrt2));
  // Mills ratio asymptotics; erfc underflows here.
  const double z2 = z * z;
  const double r = (1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2)) / z;
  return log_phi(z) + std::log(r);
}

// z with log_q(z) == target (target <= 0).
double inv_log_q(double target) {
  if (target >= 0.0) return -kInf;
  double z;
  if (target > -700.0) {
    const double two_q = 2.0 * std::exp(target);
    if (two_q >= 2.0) return -kInf;
    z = std::numbers::sqrt2 * boost::math::erfc_inv(two_q);
  } else {
    z = std::sqrt(-2.0 * target);
  }
  // Newton on log_q: d/dz log_q(z) = -phi(z)/Q(z).
  for (int it = 0; it < 3; ++it) {
    const double lq = log_q(z);
    const double slope = -std::exp(log_phi(z) - lq);
    if (!(slope < 0.0) || !std::isfinite(slope)) break;
    const double step = (lq - target) / slope;
    z -= step;
    if (std::abs(step) <= 1e-15 * (1.0 + std::abs(z))) break;
  }
  return z;
}

// ---- table helpers ---------------------------------------------------------

// Hazard column at density x (interpolated across the x grid).
std::vector<double> table_column(const law::Table& t, double x) {
  const auto& g = t.x_grid;
  if (g.size() == 1 || x <= g.front()) return t.hazard.front();
  if (x >= g.back()) return t.hazard.back();
  const auto hi = static_cast<std::size_t>(std::upper_bound(g.begin(), g.end(), x) - g.begin());
  const std::size_t lo = hi - 1;
  const double w = (x - g[lo]) / (g[hi] - g[lo]);
  std::vector<double> col(t.ages.size());
  for (std::size_t j = 0; j < col.size(); ++j) {
    col[j] = (1.0 - w) * t.hazard[lo][j] + w * t.hazard[hi][j];
  }
  return col;
}

double table_hazard(const law::Table& t, const std::vector<double>& col, double a) {
  const auto& ages = t.ages;
  if (a >= ages.back()) return col.back();
  const auto hi = static_cast<std::size_t>(std::upper_bound(ages.begin(), ages.end(), a) - ages.begin());
  const std::size_t lo = hi - 1;
  const double w = (a - ages[lo]) / (ages[hi] - ages[lo]);
  return (1.0 - w) * col[lo] + w * col[hi];
}

// Integral of the interpolated hazard over [0, a]; exact for piecewise
// linear integrands.
double table_cumulative0(const law::Table& t, const std::vector<double>& col, double a) {
  const auto& ages = t.ages;
  double sum = 0.0;
  for (std::size_t j = 0; j + 1 < ages.size(); ++j) {
    if (a <= ages[j]) return sum;
    const double right = std::min(a, ages[j + 1]);
    const double hr = table_hazard(t, col, right);
    sum += 0.5 * (col[j] + hr) * (right - ages[j]);
    if (a <= ages[j + 1]) return sum;
  }
  return sum + col.back() * (a - ages.back());
}

double table_survival_quad(const law::Table& t, const std::vector<double>& col,
                           double a0, double a1) {
  // a0 <= a1 <= ages.back()
  double sum = 0.0;
  const auto& ages = t.ages;
  for (std::size_t j = 0; j + 1 < ages.size(); ++j) {
    const double lo = std::max(a0, ages[j]);
    const double hi = std::min(a1, ages[j + 1]);
    if (hi <= lo) continue;
    sum += quad::integrate(
        [&](double a) { return std::exp(-(table_cumulative0(t, col, a))); }, lo, hi);
  }
  return sum;
}

std::string fmt_range(const DensityRange& r) {
  std::ostringstream os;
  os << "[" << r.lo << ", " << r.hi << "]";
  return os.str();
}

void require_positive(const DensityMap& m, const DensityRange& r, const char* what) {
  const double lo = m.min_over(r);
  const double hi = m.max_over(r);
  if (!(lo > 0.0) || !std::isfinite(hi)) {
    throw ConfigError(std::string(what) + " must be strictly positive and finite on x in " +
                      fmt_range(r));
  }
}

void require_finite(const DensityMap& m, const DensityRange& r, const char* what) {
  if (!std::isfinite(m.min_over(r)) || !std::isfinite(m.max_over(r))) {
    throw ConfigError(std::string(what) + " must be finite on x in " + fmt_range(r));
  }
}

}  // namespace

// ---- names -----------------------------------------------------------------

std::string_view to_string(Status s) {
  return s == Status::Search ? "S" : "M";
}

std::string_view to_string(DensityMap::Kind k) {
  switch (k) {
    case DensityMap::Kind::Constant: return "constant";
    case DensityMap::Kind::Reciprocal: return "reciprocal";
    case DensityMap::Kind::ReciprocalSquare: return "reciprocal_square";
    case DensityMap::Kind::ReciprocalSqrt: return "reciprocal_sqrt";
    case DensityMap::Kind::Affine: return "affine";
  }
  return "?";
}

std::string_view to_string(LawKind k) {
  switch (k) {
    case LawKind::Zero: return "zero";
    case LawKind::Exponential: return "exponential";
    case LawKind::Uniform: return "uniform";
    case LawKind::Pareto: return "pareto";
    case LawKind::LogNormal: return "lognormal";
    case LawKind::Table: return "table";
  }
  return "?";
}

// ---- DensityMap ------------------------------------------------------------

double DensityMap::operator()(double x) const {
  switch (kind_) {
    case Kind::Constant: return c0_;
    case Kind::Reciprocal: return c0_ / x;
    case Kind::ReciprocalSquare: return c0_ / (x * x);
    case Kind::ReciprocalSqrt: return c0_ / std::sqrt(x);
    case Kind::Affine: return c0_ + c1_ * x;
  }
  return c0_;
}

bool DensityMap::is_constant() const {
  if (kind_ == Kind::Constant) return true;
  if (kind_ == Kind::Affine) return c1_ == 0.0;
  return c0_ == 0.0;
}

double DensityMap::min_over(const DensityRange& r) const {
  return std::min((*this)(r.lo), (*this)(r.hi));
}

double DensityMap::max_over(const DensityRange& r) const {
  return std::max((*this)(r.lo), (*this)(r.hi));
}

double law::Exponential::rate(double x) const {
  return by_mean ? 1.0 / param(x) : param(x);
}

// ---- construction ----------------------------------------------------------

InteractionLaw InteractionLaw::zero() { return {law::Zero{}, DensityRange{}}; }

InteractionLaw InteractionLaw::exponential_rate(DensityMap rate, DensityRange range) {
  InteractionLaw l{law::Exponential{rate, false}, range};
  l.validate();
  return l;
}

InteractionLaw InteractionLaw::exponential_mean(DensityMap mean, DensityRange range) {
  InteractionLaw l{law::Exponential{mean, true}, range};
  l.validate();
  return l;
}

InteractionLaw InteractionLaw::uniform(DensityMap upper, DensityRange range) {
  InteractionLaw l{law::Uniform{upper}, range};
  l.validate();
  return l;
}

InteractionLaw InteractionLaw::pareto(DensityMap k, DensityMap z, DensityRange range) {
  InteractionLaw l{law::Pareto{k, z}, range};
  l.validate();
  return l;
}

InteractionLaw InteractionLaw::lognormal(DensityMap mu, DensityMap sigma, DensityRange range) {
  InteractionLaw l{law::LogNormal{mu, sigma}, range};
  l.validate();
  return l;
}

InteractionLaw InteractionLaw::table(law::Table data, DensityRange range) {
  InteractionLaw l{std::move(data), range};
  l.validate();
  return l;
}

InteractionLaw InteractionLaw::with_range(DensityRange r) const {
  InteractionLaw l{params_, r};
  l.validate();
  return l;
}

void InteractionLaw::validate() const {
  if (!(range_.lo > 0.0) || !(range_.hi > range_.lo) || !std::isfinite(range_.hi)) {
    throw ConfigError("density range must satisfy 0 < lo < hi < inf, got " + fmt_range(range_));
  }
  std::visit(
      overloaded{
          [](const law::Zero&) {},
          [&](const law::Exponential& p) {
            require_positive(p.param, range_, p.by_mean ? "exponential mean" : "exponential rate");
          },
          [&](const law::Uniform& p) {
            require_positive(p.upper, range_, "uniform upper bound");
            if (!p.upper.is_constant()) {
              throw ConfigError("uniform upper bound must not depend on the prey density");
            }
          },
          [&](const law::Pareto& p) {
            require_positive(p.k, range_, "pareto k");
            require_positive(p.z, range_, "pareto z");
            if (!(p.k.min_over(range_) > 1.0)) {
              throw ConfigError(
                  "pareto k must exceed 1 on the whole density range: for k <= 1 the mean "
                  "interaction time diverges and the functional response vanishes");
            }
          },
          [&](const law::LogNormal& p) {
            require_finite(p.mu, range_, "lognormal mu");
            require_positive(p.sigma, range_, "lognormal sigma");
          },
          [&](const law::Table& t) {
            if (t.ages.size() < 2) throw ConfigError("table needs at least two ages");
            if (t.ages.front() != 0.0) throw ConfigError("table ages must start at 0");
            if (!std::is_sorted(t.ages.begin(), t.ages.end()) ||
                std::adjacent_find(t.ages.begin(), t.ages.end()) != t.ages.end()) {
              throw ConfigError("table ages must be strictly increasing");
            }
            if (t.x_grid.empty()) throw ConfigError("table x_grid must not be empty");
            if (std::adjacent_find(t.x_grid.begin(), t.x_grid.end(),
                                   [](double a, double b) { return !(a < b); }) != t.x_grid.end()) {
              throw ConfigError("table x_grid must be strictly increasing");
            }
            if (t.hazard.size() != t.x_grid.size()) {
              throw ConfigError("table hazard needs one row per x_grid point");
            }
            for (const auto& row : t.hazard) {
              if (row.size() != t.ages.size()) {
                throw ConfigError("table hazard rows must have one value per age");
              }
              for (double h : row) {
                if (!(h >= 0.0) || !std::isfinite(h)) {
                  throw ConfigError("table hazard values must be finite and nonnegative");
                }
              }
            }
          },
      },
      params_);
}

// ---- kernels ---------------------------------------------------------------

double InteractionLaw::a_max() const {
  return std::visit(overloaded{
                        [](const law::Zero&) { return 0.0; },
                        [](const law::Uniform& p) { return p.upper(1.0); },
                        [](const auto&) { return kInf; },
                    },
                    params_);
}

bool InteractionLaw::depends_on_density() const {
  return std::visit(
      overloaded{
          [](const law::Zero&) { return false; },
          [](const law::Exponential& p) { return !p.param.is_constant(); },
          [](const law::Uniform&) { return false; },
          [](const law::Pareto& p) { return !p.k.is_constant() || !p.z.is_constant(); },
          [](const law::LogNormal& p) { return !p.mu.is_constant() || !p.sigma.is_constant(); },
          [](const law::Table& t) {
            for (std::size_t i = 1; i < t.hazard.size(); ++i) {
              if (t.hazard[i] != t.hazard.front()) return true;
            }
            return false;
          },
      },
      params_);
}

double InteractionLaw::hazard_at(double a, double x) const {
  return std::visit(
      overloaded{
          [](const law::Zero&) { return kInf; },
          [&](const law::Exponential& p) { return p.rate(x); },
          [&](const law::Uniform& p) { return 1.0 / (p.upper(x) - a); },
          [&](const law::Pareto& p) { return a >= p.z(x) ? p.k(x) / a : 0.0; },
          [&](const law::LogNormal& p) {
            if (a <= 0.0) return 0.0;
            const double s = p.sigma(x);
            const double z = (std::log(a) - p.mu(x)) / s;
            return std::exp(log_phi(z) - log_q(z)) / (s * a);
          },
          [&](const law::Table& t) { return table_hazard(t, table_column(t, x), a); },
      },
      params_);
}

double InteractionLaw::log_survival_at(double x, double a) const {
  if (a <= 0.0) return 0.0;
  return std::visit(
      overloaded{
          [](const law::Zero&) { return -kInf; },
          [&](const law::Exponential& p) { return -p.rate(x) * a; },
          [&](const law::Uniform& p) {
            const double b = p.upper(x);
            return a >= b ? -kInf : std::log1p(-a / b);
          },
          [&](const law::Pareto& p) {
            const double z = p.z(x);
            return a <= z ? 0.0 : -p.k(x) * std::log(a / z);
          },
          [&](const law::LogNormal& p) { return log_q((std::log(a) - p.mu(x)) / p.sigma(x)); },
          [&](const law::Table& t) { return -table_cumulative0(t, table_column(t, x), a); },
      },
      params_);
}

double InteractionLaw::survival_at(double x, double a) const {
  return std::exp(log_survival_at(x, a));
}

double InteractionLaw::cumulative_at(double a0, double a1, double x) const {
  if (!(a1 > a0)) return 0.0;
  return std::visit(
      overloaded{
          [](const law::Zero&) { return kInf; },
          [&](const law::Exponential& p) { return p.rate(x) * (a1 - a0); },
          [&](const law::Uniform& p) {
            const double b = p.upper(x);
            if (a1 >= b) return kInf;
            return std::log((b - a0) / (b - a1));
          },
          [&](const law::Pareto& p) {
            const double z = p.z(x);
            return p.k(x) * std::log(std::max(a1, z) / std::max(a0, z));
          },
          [&](const law::LogNormal& p) {
            // Difference of log-survivals; exact, no quadrature needed.
            const double mu = p.mu(x);
            const double s = p.sigma(x);
            const double l0 = a0 > 0.0 ? log_q((std::log(a0) - mu) / s) : 0.0;
            const double l1 = log_q((std::log(a1) - mu) / s);
            return l0 - l1;
          },
          [&](const law::Table& t) {
            const auto col = table_column(t, x);
            return table_cumulative0(t, col, a1) - table_cumulative0(t, col, a0);
          },
      },
      params_);
}

double InteractionLaw::age_after(double x, double a0, double budget) const {
  if (budget <= 0.0) return a0;
  return std::visit(
      overloaded{
          [&](const law::Zero&) { return a0; },
          [&](const law::Exponential& p) {
            const double r = p.rate(x);
            return r > 0.0 ? a0 + budget / r : kInf;
          },
          [&](const law::Uniform& p) {
            const double b = p.upper(x);
            const double a1 = b - (b - a0) * std::exp(-budget);
            return std::min(std::max(a1, a0), std::nextafter(b, 0.0));
          },
          [&](const law::Pareto& p) {
            return std::max(a0, p.z(x)) * std::exp(budget / p.k(x));
          },
          [&](const law::LogNormal& p) {
            const double mu = p.mu(x);
            const double s = p.sigma(x);
            const double l0 = a0 > 0.0 ? log_q((std::log(a0) - mu) / s) : 0.0;
            const double z = inv_log_q(l0 - budget);
            return std::max(a0, std::exp(mu + s * z));
          },
          [&](const law::Table& t) {
            const auto col = table_column(t, x);
            const double h0 = table_cumulative0(t, col, a0);
            const double target = h0 + budget;
            if (col.back() <= 0.0 && table_cumulative0(t, col, t.ages.back()) < target) {
              return kInf;
            }
            double lo = a0;
            double hi = std::max(a0, t.ages.back()) + 1.0;
            while (table_cumulative0(t, col, hi) < target) hi = 2.0 * hi + 1.0;
            // Bisection to an absolute age tolerance of 1e-12.
            while (hi - lo > 1e-12 * std::max(1.0, hi)) {
              const double mid = 0.5 * (lo + hi);
              if (mid <= lo || mid >= hi) break;
              (table_cumulative0(t, col, mid) < target ? lo : hi) = mid;
            }
            return hi;
          },
      },
      params_);
}

double InteractionLaw::mean_at(double x) const {
  return std::visit(
      overloaded{
          [](const law::Zero&) { return 0.0; },
          [&](const law::Exponential& p) { return 1.0 / p.rate(x); },
          [&](const law::Uniform& p) { return 0.5 * p.upper(x); },
          [&](const law::Pareto& p) {
            const double k = p.k(x);
            return p.z(x) * k / (k - 1.0);
          },
          [&](const law::LogNormal& p) {
            const double s = p.sigma(x);
            return std::exp(p.mu(x) + 0.5 * s * s);
          },
          [&](const law::Table&) { return residual_at(x, 0.0); },
      },
      params_);
}

double InteractionLaw::residual_at(double x, double a) const {
  return std::visit(
      overloaded{
          [](const law::Zero&) { return 0.0; },
          [&](const law::Exponential& p) {
            const double r = p.rate(x);
            return std::exp(-r * a) / r;
          },
          [&](const law::Uniform& p) {
            const double b = p.upper(x);
            return a >= b ? 0.0 : 0.5 * (b - a) * (b - a) / b;
          },
          [&](const law::Pareto& p) {
            const double k = p.k(x);
            const double z = p.z(x);
            if (a < z) return (z - a) + z / (k - 1.0);
            return a * std::exp(-k * std::log(a / z)) / (k - 1.0);
          },
          [&](const law::LogNormal& p) {
            const double mu = p.mu(x);
            const double s = p.sigma(x);
            if (a <= 0.0) return std::exp(mu + 0.5 * s * s);
            const double z = (std::log(a) - mu) / s;
            const double lq = log_q(z);
            if (lq > std::log(1e-8)) {
              // E[(T - a)^+]
              return std::exp(mu + 0.5 * s * s + log_q(z - s)) - a * std::exp(lq);
            }
            // Deep tail: survival over hazard, relative error O(1/z^2) on a
            // quantity below 1e-8 of the mean.
            return std::exp(lq) / hazard_at(a, x);
          },
          [&](const law::Table& t) {
            const auto col = table_column(t, x);
            const double end = t.ages.back();
            const double tail_rate = col.back();
            if (a >= end) {
              return tail_rate > 0.0 ? std::exp(-table_cumulative0(t, col, a)) / tail_rate : kInf;
            }
            const double s_end = std::exp(-table_cumulative0(t, col, end));
            const double tail = s_end > 0.0 ? (tail_rate > 0.0 ? s_end / tail_rate : kInf) : 0.0;
            return table_survival_quad(t, col, a, end) + tail;
          },
      },
      params_);
}

double InteractionLaw::tail_cut(double x) const {
  if (is_zero()) return 0.0;
  const double bound = a_max();
  if (std::isfinite(bound)) return bound;
  return age_after(x, 0.0, kLogTail);
}

double InteractionLaw::sample_at(double x, Rng& rng) const {
  return std::visit(
      overloaded{
          [](const law::Zero&) { return 0.0; },
          [&](const law::Exponential& p) { return standard_exponential(rng) / p.rate(x); },
          [&](const law::Uniform& p) { return p.upper(x) * uniform01(rng); },
          [&](const law::Pareto& p) {
            return p.z(x) * std::pow(uniform_open0(rng), -1.0 / p.k(x));
          },
          [&](const law::LogNormal& p) {
            // Inverse CDF: Phi^{-1}(u) = -sqrt(2) erfc_inv(2u).
            double u = uniform01(rng);
            while (u <= 0.0) u = uniform01(rng);
            const double z = -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
            return std::exp(p.mu(x) + p.sigma(x) * z);
          },
          [&](const law::Table&) { return age_after(x, 0.0, standard_exponential(rng)); },
      },
      params_);
}

std::vector<double> InteractionLaw::breakpoints(double x) const {
  return std::visit(overloaded{
                        [&](const law::Pareto& p) { return std::vector<double>{p.z(x)}; },
                        [&](const law::LogNormal& p) {
                          const double m = std::exp(p.mu(x));
                          const double s = p.sigma(x);
                          return std::vector<double>{m * std::exp(-2.0 * s), m,
                                                     m * std::exp(2.0 * s)};
                        },
                        [](const law::Table& t) { return t.ages; },
                        [](const auto&) { return std::vector<double>{}; },
                    },
                    params_);
}

// ---- checked operations ----------------------------------------------------

namespace {

void check_density(const InteractionLaw& law, double x) {
  if (!law.range().contains(x)) {
    std::ostringstream os;
    os << "prey density " << x << " outside admissible range " << fmt_range(law.range());
    throw DomainError(os.str());
  }
}

}  // namespace

double hazard(const InteractionLaw& law, double a, double x) {
  check_density(law, x);
  if (!(a >= 0.0) || !(a < law.a_max())) {
    std::ostringstream os;
    os << "age " << a << " outside the support [0, " << law.a_max() << ")";
    throw DomainError(os.str());
  }
  return law.hazard_at(a, x);
}

double cumulative_hazard(const InteractionLaw& law, double a0, double a1, double x) {
  check_density(law, x);
  if (!(a0 >= 0.0) || !(a1 >= a0) || !(a1 <= law.a_max())) {
    std::ostringstream os;
    os << "cumulative hazard needs 0 <= a0 <= a1 <= a_max, got [" << a0 << ", " << a1 << "]";
    throw DomainError(os.str());
  }
  return law.cumulative_at(a0, a1, x);
}

double survival(const InteractionLaw& law, double x, double a) {
  if (law.is_zero()) {
    check_density(law, x);
    return 0.0;
  }
  return std::exp(-cumulative_hazard(law, 0.0, a, x));
}

double sample_interaction_time(const InteractionLaw& law, double x, Rng& rng) {
  check_density(law, x);
  return law.sample_at(x, rng);
}

double mean_time(const InteractionLaw& law, double x) {
  check_density(law, x);
  return law.mean_at(x);
}

double integrate_against_survival(const InteractionLaw& law, double x,
                                  const std::function<double(double)>& w) {
  check_density(law, x);
  if (law.is_zero()) return 0.0;
  const double cut = law.tail_cut(x);
  if (!std::isfinite(cut)) return kInf;
  const auto f = [&](double a) {
    const double p = law.survival_at(x, a);
    return p > 0.0 ? w(a) * p : 0.0;
  };
  // Decade cuts help the adaptive rule on long heavy tails.
  std::vector<double> cuts = law.breakpoints(x);
  const double scale = std::min(law.mean_at(x), cut);
  for (double c = scale; c < cut && std::isfinite(c) && c > 0.0; c *= 10.0) cuts.push_back(c);
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> pts{0.0};
  for (double c : cuts) {
    if (c > pts.back() && c < cut) pts.push_back(c);
  }
  pts.push_back(cut);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) sum += quad::integrate(f, pts[i], pts[i + 1]);
  if (!std::isfinite(law.a_max())) sum += w(cut) * law.residual_at(x, cut);
  return sum;
}

double survival_integral(const InteractionLaw& law, double x, double a0, double a1) {
  check_density(law, x);
  if (law.is_zero() || !(a1 > a0)) return 0.0;
  a1 = std::min(a1, law.a_max());
  switch (law.kind()) {
    case LawKind::Exponential:
    case LawKind::Uniform:
    case LawKind::Pareto:
      return law.residual_at(x, a0) - (std::isfinite(a1) ? law.residual_at(x, a1) : 0.0);
    default:
      break;
  }
  const double cut = law.tail_cut(x);
  const auto f = [&](double a) { return law.survival_at(x, a); };
  if (!std::isfinite(a1) || a1 >= cut) {
    if (a0 >= cut) return law.residual_at(x, a0);
    const auto bp = law.breakpoints(x);
    double sum = 0.0;
    std::vector<double> pts{a0};
    for (double c : bp) {
      if (c > a0 && c < cut) pts.push_back(c);
    }
    pts.push_back(cut);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) sum += quad::integrate(f, pts[i], pts[i + 1]);
    if (!std::isfinite(a1)) return sum + law.residual_at(x, cut);
    return sum + law.residual_at(x, cut) - law.residual_at(x, a1);
  }
  const auto bp = law.breakpoints(x);
  std::vector<double> pts{a0};
  for (double c : bp) {
    if (c > a0 && c < a1) pts.push_back(c);
  }
  pts.push_back(a1);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) sum += quad::integrate(f, pts[i], pts[i + 1]);
  return sum;
}

}  // namespace predprey
