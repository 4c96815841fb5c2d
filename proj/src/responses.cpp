#include "predprey/responses.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "predprey/errors.hpp"
#include "predprey/io.hpp"

namespace predprey {

namespace {

void check_x(const ResponseModel& model, double x) {
  if (!model.x_range().contains(x)) {
    std::ostringstream os;
    os << "prey density " << x << " outside the model range [" << model.x_range().lo << ", "
       << model.x_range().hi << "]";
    throw DomainError(os.str());
  }
}

constexpr Status kStatuses[] = {Status::Search, Status::Manipulate};

}  // namespace

ResponseModel::ResponseModel(InteractionLaw law_search, InteractionLaw law_manipulate,
                             DemographyRates rates, DensityRange x_range, ClosedForms closed)
    : has_laws_(true),
      laws_{law_search.is_zero() ? law_search : law_search.with_range(x_range),
            law_manipulate.is_zero() ? law_manipulate : law_manipulate.with_range(x_range)},
      rates_(std::move(rates)),
      x_range_(x_range),
      closed_(std::move(closed)) {
  if (laws_[0].is_zero() && laws_[1].is_zero()) {
    throw ConfigError("at least one of the search and manipulate laws must be non-degenerate");
  }
  rates_.validate();
}

ResponseModel ResponseModel::analytic(ScalarFn phi_fn, ScalarFn psi_fn, double prey_gamma,
                                      double prey_beta, DensityRange x_range, ClosedForms extra) {
  if (!phi_fn || !psi_fn) throw ConfigError("analytic model needs both phi and psi");
  ResponseModel m;
  m.has_laws_ = false;
  m.rates_.prey_gamma = prey_gamma;
  m.rates_.prey_beta = prey_beta;
  m.rates_.validate();
  m.x_range_ = x_range;
  m.closed_ = std::move(extra);
  m.closed_.phi = std::move(phi_fn);
  m.closed_.psi = std::move(psi_fn);
  return m;
}

const InteractionLaw& ResponseModel::law(Status s) const {
  if (!has_laws_) throw ContractError("analytic model has no interaction laws");
  return laws_[index(s)];
}

double phi(const ResponseModel& model, double x) {
  check_x(model, x);
  if (!model.has_laws()) return model.closed().phi(x);
  const double total = model.law(Status::Search).mean_at(x) + model.law(Status::Manipulate).mean_at(x);
  if (!(total > 0.0)) throw DomainError("mean interaction time vanishes");
  return 1.0 / total;
}

double phi_quadrature(const ResponseModel& model, double x) {
  check_x(model, x);
  if (!model.has_laws()) throw ContractError("analytic model has no survival functions");
  double total = 0.0;
  for (Status s : kStatuses) {
    total += integrate_against_survival(model.law(s), x, [](double) { return 1.0; });
  }
  if (!(total > 0.0)) throw DomainError("mean interaction time vanishes");
  return 1.0 / total;
}

double psi(const ResponseModel& model, double x) {
  check_x(model, x);
  if (!model.has_laws()) return model.closed().psi(x);
  double weighted = 0.0;
  double total = 0.0;
  for (Status s : kStatuses) {
    const auto& law = model.law(s);
    if (law.is_zero()) continue;
    const auto& demo = model.rates().of(s);
    const double mass = law.mean_at(x);
    if (!std::isfinite(mass)) {
      throw DomainError("interaction time has infinite mean; growth rate is not integrable");
    }
    total += mass;
    weighted += integrate_against_survival(law, x, [&demo](double a) { return demo.net(a); });
  }
  return weighted / total;
}

std::vector<ResponseRow> response_table(const ResponseModel& model, std::span<const double> x_grid) {
  std::vector<ResponseRow> rows;
  rows.reserve(x_grid.size());
  for (double x : x_grid) {
    ResponseRow row;
    row.x = x;
    try {
      row.phi = phi(model, x);
      row.psi = psi(model, x);
    } catch (const std::exception& e) {
      row.ok = false;
      row.phi = std::nan("");
      row.psi = std::nan("");
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string response_table_csv(std::span<const ResponseRow> rows) {
  std::string out = "x,phi,psi\n";
  for (const auto& r : rows) {
    out += io::format_double(r.x);
    out += ',';
    out += io::format_double(r.phi);
    out += ',';
    out += io::format_double(r.psi);
    out += '\n';
  }
  return out;
}

bool AssumptionReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

const AssumptionCheck* AssumptionReport::find(std::string_view name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

nlohmann::json AssumptionReport::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : checks) {
    arr.push_back({{"name", c.name},
                   {"pass", c.pass},
                   {"value", std::isfinite(c.value) ? nlohmann::json(c.value) : nlohmann::json(io::format_double(c.value))},
                   {"detail", c.detail}});
  }
  return {{"all_pass", all_pass()}, {"checks", arr}};
}

namespace {

// Integral of (1 + sup_x alpha(a, x)) exp(-1/2 int_0^a inf_x alpha(s, x) ds)
// over the support, on growing windows. Reports the value and whether the
// window increments died out.
AssumptionCheck integrability_proxy(const InteractionLaw& law, std::span<const double> grid,
                                    std::string name) {
  AssumptionCheck check{std::move(name), false, 0.0, ""};
  const auto sup_inf = [&](double a) {
    double hi = 0.0, lo = kInf;
    for (double x : grid) {
      const double h = law.hazard_at(a, x);
      hi = std::max(hi, h);
      lo = std::min(lo, h);
    }
    return std::pair{hi, lo};
  };

  const double bound = law.a_max();
  const bool bounded = std::isfinite(bound);
  double scale = bounded ? bound : 0.0;
  if (!bounded) {
    for (double x : grid) {
      const double m = law.mean_at(x);
      if (std::isfinite(m)) scale = std::max(scale, m);
    }
    if (law.kind() == LawKind::Table) {
      scale = std::max(scale, std::get<law::Table>(law.params()).ages.back());
    }
    if (!(scale > 0.0)) scale = 1.0;
  }

  constexpr int kPieces = 80;
  constexpr int kSub = 128;  // Simpson sub-intervals per window
  double total = 0.0;
  double last_increment = kInf;
  double inner = 0.0;  // running integral of the inf hazard
  double a_prev = 0.0;
  auto [hi_prev, lo_prev] = sup_inf(0.0);
  double prev_integrand = (1.0 + hi_prev);
  bool converged = false;
  double window_lo = 0.0;
  for (int k = 0; k < kPieces; ++k) {
    const double window_hi = bounded ? bound * (1.0 - std::ldexp(1.0, -(k + 1)))
                                     : scale * std::ldexp(1.0, k);
    const double h = (window_hi - window_lo) / kSub;
    double increment = 0.0;
    for (int i = 1; i <= kSub; ++i) {
      // Simpson on [a_prev, a] with the midpoint.
      const double a = window_lo + i * h;
      const double mid = a - 0.5 * h;
      const auto [hm, lm] = sup_inf(mid);
      const auto [ha, la] = sup_inf(a);
      const double inner_mid = inner + 0.25 * h * (lo_prev + lm);
      const double inner_a = inner + h * (lo_prev + 4.0 * lm + la) / 6.0;
      const double f_mid = (1.0 + hm) * std::exp(-0.5 * inner_mid);
      const double f_a = (1.0 + ha) * std::exp(-0.5 * inner_a);
      increment += h * (prev_integrand + 4.0 * f_mid + f_a) / 6.0;
      inner = inner_a;
      lo_prev = la;
      prev_integrand = f_a;
      a_prev = a;
    }
    total += increment;
    last_increment = increment;
    window_lo = window_hi;
    if (!std::isfinite(total) || total > 1e15) break;
    if (k >= 3 && increment <= 1e-8 * total) {
      converged = true;
      break;
    }
  }
  (void)a_prev;
  check.value = total;
  check.pass = converged && std::isfinite(total);
  std::ostringstream os;
  os << (check.pass ? "finite" : "divergent") << " (last window increment " << last_increment
     << ")";
  check.detail = os.str();
  return check;
}

std::vector<double> default_grid(const DensityRange& r) {
  const double lo = std::max(r.lo, 0.1);
  const double hi = std::min(r.hi, 10.0);
  std::vector<double> g;
  if (!(hi > lo)) return {r.clamp(1.0)};
  for (int i = 0; i < 9; ++i) g.push_back(lo * std::pow(hi / lo, i / 8.0));
  return g;
}

}  // namespace

AssumptionReport check_assumptions(const ResponseModel& model, std::span<const double> x_grid) {
  AssumptionReport report;
  std::vector<double> grid(x_grid.begin(), x_grid.end());
  if (grid.empty()) grid = default_grid(model.x_range());

  if (model.has_laws()) {
    for (Status s : kStatuses) {
      const auto& law = model.law(s);
      const std::string tag(to_string(s));
      if (law.is_zero()) {
        report.checks.push_back({"min_mean_time_" + tag, true, 0.0,
                                 "degenerate zero law: the phase is skipped"});
        continue;
      }
      double m = kInf;
      for (double x : grid) m = std::min(m, law.mean_at(x));
      report.checks.push_back({"min_mean_time_" + tag, m > 0.0, m, "min of E[T] over the x grid"});
      report.checks.push_back(integrability_proxy(law, grid, "integrability_" + tag));
    }
    for (Status s : kStatuses) {
      const auto& d = model.rates().of(s);
      const std::string tag(to_string(s));
      const double bound = d.birth_bound() + d.death_bound();
      report.checks.push_back({"demography_bounded_" + tag, std::isfinite(bound), bound,
                               "sup of birth + death rates"});
      report.checks.push_back({"demography_split_" + tag, d.split_consistent(), 0.0,
                               d.split_consistent()
                                   ? "net growth equals clipped birth minus death"
                                   : "a birth or death curve goes negative; the simulator clips it"});
    }
  }

  double worst = 0.0;
  bool finite = true;
  std::string where;
  for (double x : grid) {
    try {
      const double f = phi(model, x);
      const double g = psi(model, x);
      if (!std::isfinite(f) || !std::isfinite(g)) {
        finite = false;
        where = "non-finite at x=" + io::format_double(x);
      }
      worst = std::max({worst, std::abs(f), std::abs(g)});
    } catch (const std::exception& e) {
      finite = false;
      where = e.what();
    }
  }
  report.checks.push_back({"responses_finite", finite, worst,
                           finite ? "max |phi|, |psi| over the x grid" : where});
  return report;
}

}  // namespace predprey
