#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "predprey/demography.hpp"
#include "predprey/hazards.hpp"

namespace predprey {

using ScalarFn = std::function<double(double)>;

/// Optional analytic expressions a preset can register. Empty members mean
/// "not available"; consumers fall back to quadrature or finite differences.
struct ClosedForms {
  ScalarFn phi;
  ScalarFn psi;
  ScalarFn dphi;
  ScalarFn dpsi;
  /// u -> integral_1^u psi(e^s) ds, used by the conservation law.
  ScalarFn psi_log_integral;
};

/// Interaction laws and demography of one prey–predator model, or (for
/// purely analytic presets) the response functions themselves.
class ResponseModel {
 public:
  ResponseModel(InteractionLaw law_search, InteractionLaw law_manipulate, DemographyRates rates,
                DensityRange x_range = {}, ClosedForms closed = {});

  /// Model given directly by phi and psi; it has no individual-level laws
  /// and cannot be simulated.
  static ResponseModel analytic(ScalarFn phi, ScalarFn psi, double prey_gamma, double prey_beta,
                                DensityRange x_range = {}, ClosedForms extra = {});

  bool has_laws() const { return has_laws_; }
  const InteractionLaw& law(Status s) const;
  const DemographyRates& rates() const { return rates_; }
  const DensityRange& x_range() const { return x_range_; }
  const ClosedForms& closed() const { return closed_; }

 private:
  ResponseModel() = default;

  bool has_laws_ = false;
  InteractionLaw laws_[2] = {InteractionLaw::zero(), InteractionLaw::zero()};
  DemographyRates rates_;
  DensityRange x_range_;
  ClosedForms closed_;
};

/// Functional response 1 / (E[T_S(x)] + E[T_M(x)]).
double phi(const ResponseModel& model, double x);

/// 1 / integral (p_S + p_M) da, by quadrature of the survival functions.
double phi_quadrature(const ResponseModel& model, double x);

/// Predator growth rate phi(x) * sum_r integral lambda_r(a) p_r(x, a) da.
double psi(const ResponseModel& model, double x);

struct ResponseRow {
  double x = 0.0;
  double phi = 0.0;
  double psi = 0.0;
  bool ok = true;
  std::string error;
};

std::vector<ResponseRow> response_table(const ResponseModel& model, std::span<const double> x_grid);

/// CSV with header `x,phi,psi`; failed rows carry nan values.
std::string response_table_csv(std::span<const ResponseRow> rows);

struct AssumptionCheck {
  std::string name;
  bool pass = false;
  double value = 0.0;
  std::string detail;
};

struct AssumptionReport {
  std::vector<AssumptionCheck> checks;

  bool all_pass() const;
  const AssumptionCheck* find(std::string_view name) const;
  nlohmann::json to_json() const;
};

/// Numerical diagnostics of the model hypotheses on an x grid (default:
/// 9 log-spaced points of [0.1, 10] clipped to the model range).
AssumptionReport check_assumptions(const ResponseModel& model, std::span<const double> x_grid = {});

}  // namespace predprey
