#include "predprey/presets.hpp"

#include <cmath>
#include <numbers>

#include "predprey/errors.hpp"

namespace predprey {

namespace {

StatusDemography constant_net(double lambda) {
  return {RateCurve::constant(std::max(lambda, 0.0)), RateCurve::constant(std::max(-lambda, 0.0))};
}

DemographyRates constant_rates(const PresetParams& p) {
  DemographyRates r;
  r.predator[index(Status::Search)] = constant_net(p.at("lambda_S"));
  r.predator[index(Status::Manipulate)] = constant_net(p.at("lambda_M"));
  r.prey_gamma = p.at("gamma");
  r.prey_beta = p.at("beta");
  return r;
}

// phi = c x^n / (1 + t0 c x^n), psi = lS + (lM - lS) t0 phi, n = 1 or 2.
ClosedForms holling_forms(double c, double t0, double lS, double lM, int n) {
  ClosedForms f;
  const auto pw = [n](double x) { return n == 1 ? x : x * x; };
  const auto dpw = [n](double x) { return n == 1 ? 1.0 : 2.0 * x; };
  f.phi = [=](double x) { return c * pw(x) / (1.0 + t0 * c * pw(x)); };
  f.psi = [=](double x) { return lS + (lM - lS) * t0 * c * pw(x) / (1.0 + t0 * c * pw(x)); };
  f.dphi = [=](double x) {
    const double d = 1.0 + t0 * c * pw(x);
    return c * dpw(x) / (d * d);
  };
  f.dpsi = [=](double x) {
    const double d = 1.0 + t0 * c * pw(x);
    return (lM - lS) * t0 * c * dpw(x) / (d * d);
  };
  return f;
}

const std::map<std::string, PresetParams, std::less<>>& table() {
  static const std::map<std::string, PresetParams, std::less<>> t = {
      {"holling1", {{"c", 1.0}, {"lambda_S", 1.0}, {"gamma", 1.0}, {"beta", 0.0}, {"x0", 1.0}, {"y0", 0.5}}},
      {"holling2",
       {{"c", 1.0}, {"t0", 1.0}, {"lambda_S", -1.0}, {"lambda_M", 1.0}, {"gamma", 1.0}, {"beta", 0.0},
        {"x0", 1.5}, {"y0", 1.5}}},
      {"holling3",
       {{"c", 1.0}, {"t0", 1.0}, {"lambda_S", -1.0}, {"lambda_M", 1.0}, {"gamma", 1.0}, {"beta", 0.0},
        {"x0", 1.5}, {"y0", 1.5}}},
      {"lotka_volterra",
       {{"c", 1.0}, {"A", 1.0}, {"B", 1.0}, {"gamma", 1.0}, {"beta", 0.0}, {"x0", 1.5}, {"y0", 1.0}}},
      {"age_penalty",
       {{"c", 1.0}, {"A", 1.0}, {"B", 1.0}, {"C", 1.0}, {"gamma", 1.0}, {"beta", 0.0}, {"x0", 1.5},
        {"y0", 1.0}}},
      {"nearest_prey",
       {{"c", 1.0}, {"t0", 0.5}, {"lambda_S", -1.0}, {"lambda_M", 1.0}, {"gamma", 1.0}, {"beta", 0.0},
        {"x0", 1.5}, {"y0", 1.0}}},
  };
  return t;
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [k, v] : table()) n.push_back(k);
    return n;
  }();
  return names;
}

PresetParams preset_defaults(std::string_view name) {
  const auto it = table().find(name);
  if (it == table().end()) {
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown preset '" + std::string(name) + "' (known: " + known + ")");
  }
  return it->second;
}

Preset make_preset(std::string_view name, const PresetParams& overrides, std::string_view path) {
  PresetParams p;
  try {
    p = preset_defaults(name);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(path) + ".preset: " + e.what());
  }
  for (const auto& [k, v] : overrides) {
    if (!p.contains(k)) {
      throw ConfigError(std::string(path) + ".params." + k + ": unknown parameter for preset " +
                        std::string(name));
    }
    if (!std::isfinite(v)) throw ConfigError(std::string(path) + ".params." + k + ": must be finite");
    p[k] = v;
  }
  for (const char* key : {"c", "t0", "x0"}) {
    if (p.contains(key) && !(p.at(key) > 0.0)) {
      throw ConfigError(std::string(path) + ".params." + key + ": must be positive");
    }
  }
  if (!(p.at("y0") >= 0.0)) throw ConfigError(std::string(path) + ".params.y0: must be nonnegative");

  const double c = p.at("c");
  const DensityRange range{};
  std::optional<ResponseModel> model;
  std::optional<double> slope;
  std::pair<double, double> bracket{1e-3, 1e3};
  try {
    if (name == "holling1") {
      const double lS = p.at("lambda_S");
      DemographyRates r;
      r.predator[index(Status::Search)] = constant_net(lS);
      r.prey_gamma = p.at("gamma");
      r.prey_beta = p.at("beta");
      ClosedForms f;
      f.phi = [c](double x) { return c * x; };
      f.psi = [lS](double) { return lS; };
      f.dphi = [c](double) { return c; };
      f.dpsi = [](double) { return 0.0; };
      f.psi_log_integral = [lS](double u) { return lS * (u - 1.0); };
      model.emplace(InteractionLaw::exponential_mean(DensityMap::reciprocal(1.0 / c)),
                    InteractionLaw::zero(), r, range, f);
      slope = c;
    } else if (name == "holling2" || name == "holling3") {
      const int n = name == "holling2" ? 1 : 2;
      const double t0 = p.at("t0");
      const auto mean_S = n == 1 ? DensityMap::reciprocal(1.0 / c) : DensityMap::reciprocal_square(1.0 / c);
      model.emplace(InteractionLaw::exponential_mean(mean_S),
                    InteractionLaw::exponential_mean(DensityMap::constant(t0)), constant_rates(p), range,
                    holling_forms(c, t0, p.at("lambda_S"), p.at("lambda_M"), n));
    } else if (name == "lotka_volterra") {
      const double A = p.at("A");
      const double B = p.at("B");
      ClosedForms f;
      f.dphi = [c](double) { return c; };
      f.dpsi = [B](double) { return B; };
      f.psi_log_integral = [A, B](double u) {
        return -A * (u - 1.0) + B * (std::exp(u) - std::numbers::e);
      };
      model = ResponseModel::analytic([c](double x) { return c * x; },
                                      [A, B](double x) { return -A + B * x; }, p.at("gamma"),
                                      p.at("beta"), range, f);
      slope = c;
    } else if (name == "age_penalty") {
      const double A = p.at("A"), B = p.at("B"), C = p.at("C");
      DemographyRates r;
      r.predator[index(Status::Search)] = StatusDemography::from_net(RateCurve::exp_decay(A, B, C));
      r.prey_gamma = p.at("gamma");
      r.prey_beta = p.at("beta");
      // E int_0^{T_S} lambda_S = -A/(c x) + B/(C + c x) for T_S ~ Exp(c x).
      ClosedForms f;
      f.phi = [c](double x) { return c * x; };
      f.psi = [=](double x) { return -A + B * c * x / (C + c * x); };
      f.dphi = [c](double) { return c; };
      f.dpsi = [=](double x) { return B * c * C / ((C + c * x) * (C + c * x)); };
      f.psi_log_integral = [=](double u) {
        return -A * (u - 1.0) + B * std::log((C + c * std::exp(u)) / (C + c * std::numbers::e));
      };
      model.emplace(InteractionLaw::exponential_rate(DensityMap::affine(0.0, c)), InteractionLaw::zero(),
                    r, range, f);
      slope = c;
    } else if (name == "nearest_prey") {
      const double t0 = p.at("t0");
      const double lS = p.at("lambda_S"), lM = p.at("lambda_M");
      ClosedForms f;
      f.phi = [=](double x) { return std::sqrt(x) / (c + t0 * std::sqrt(x)); };
      f.psi = [=](double x) { return (lS * c + lM * t0 * std::sqrt(x)) / (c + t0 * std::sqrt(x)); };
      f.dphi = [=](double x) {
        const double s = std::sqrt(x);
        return c / (2.0 * s * (c + t0 * s) * (c + t0 * s));
      };
      f.dpsi = [=](double x) {
        const double s = std::sqrt(x);
        return (lM - lS) * c * t0 / (2.0 * s * (c + t0 * s) * (c + t0 * s));
      };
      model.emplace(InteractionLaw::exponential_mean(DensityMap::reciprocal_sqrt(c)),
                    InteractionLaw::uniform(DensityMap::constant(2.0 * t0)), constant_rates(p), range, f);
    }
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(path) + ".params: " + e.what());
  }
  return Preset{std::string(name), p, std::move(*model), slope, p.at("x0"), p.at("y0"), bracket};
}

}  // namespace predprey
