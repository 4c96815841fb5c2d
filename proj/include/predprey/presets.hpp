#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "predprey/responses.hpp"

namespace predprey {

using PresetParams = std::map<std::string, double>;

/// Built-in models:
///   holling1        E[T_S] = 1/(c x), no manipulation phase
///   holling2        E[T_S] = 1/(c x), E[T_M] = t0
///   holling3        E[T_S] = 1/(c x^2), E[T_M] = t0
///   lotka_volterra  phi = c x, psi = -A + B x (analytic only)
///   age_penalty     T_S ~ Exp(c x), no manipulation, lambda_S(a) = -A + B e^{-C a}
///   nearest_prey    E[T_S] = c / sqrt(x), T_M ~ Uniform[0, 2 t0]
/// Every preset also carries a suggested start (x0, y0).
struct Preset {
  std::string name;
  PresetParams params;  ///< defaults merged with overrides
  ResponseModel model;
  std::optional<double> linear_phi_slope;
  double x0 = 1.0;
  double y0 = 1.0;
  std::pair<double, double> bracket{1e-3, 1e3};  ///< equilibrium search window
};

const std::vector<std::string>& preset_names();

/// Default parameters; throws ConfigError for an unknown preset.
PresetParams preset_defaults(std::string_view name);

/// Unknown parameter names are rejected; `path` prefixes error messages.
Preset make_preset(std::string_view name, const PresetParams& overrides = {},
                   std::string_view path = ".model");

}  // namespace predprey
