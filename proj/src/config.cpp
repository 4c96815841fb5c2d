#include "predprey/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "predprey/errors.hpp"

namespace predprey {

using json = nlohmann::json;

std::string_view to_string(Command c) {
  switch (c) {
    case Command::Responses: return "responses";
    case Command::Simulate: return "simulate";
    case Command::Ode: return "ode";
    case Command::Study: return "study";
  }
  return "?";
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

std::string type_name(const json& j) { return j.type_name(); }

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, std::string("expected a number, got ") + type_name(j));
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "must be finite");
  return v;
}

std::uint64_t as_unsigned(const json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (v >= 0.0 && v == std::floor(v) && v < 1.8e19) return static_cast<std::uint64_t>(v);
  }
  fail(path, "expected a nonnegative integer");
}

// Object reader that tracks consumed keys so that leftovers can be
// reported as unknown.
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) fail(path_.empty() ? "." : path_, std::string("expected an object, got ") + type_name(j));
  }

  std::string at(std::string_view key) const { return path_ + "." + std::string(key); }

  const json* find(std::string_view key) {
    used_.insert(std::string(key));
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  const json& need(std::string_view key) {
    const json* v = find(key);
    if (v == nullptr) fail(at(key), "required");
    return *v;
  }

  double number(std::string_view key) { return as_number(need(key), at(key)); }
  double number(std::string_view key, double def) {
    const json* v = find(key);
    return v ? as_number(*v, at(key)) : def;
  }
  double positive(std::string_view key) {
    const double v = number(key);
    if (!(v > 0.0)) fail(at(key), "must be positive");
    return v;
  }
  double positive(std::string_view key, double def) {
    const double v = number(key, def);
    if (!(v > 0.0)) fail(at(key), "must be positive");
    return v;
  }
  std::uint64_t count(std::string_view key, std::uint64_t def, std::uint64_t min = 1) {
    const json* v = find(key);
    const std::uint64_t n = v ? as_unsigned(*v, at(key)) : def;
    if (n < min) fail(at(key), "must be at least " + std::to_string(min));
    return n;
  }
  bool boolean(std::string_view key, bool def) {
    const json* v = find(key);
    if (!v) return def;
    if (!v->is_boolean()) fail(at(key), "expected a boolean");
    return v->get<bool>();
  }
  std::string string(std::string_view key) {
    const json& v = need(key);
    if (!v.is_string()) fail(at(key), "expected a string");
    return v.get<std::string>();
  }
  std::optional<std::string> string_opt(std::string_view key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_string()) fail(at(key), "expected a string");
    return v->get<std::string>();
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!used_.contains(k)) fail(at(k), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

std::vector<double> number_array(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
  return v;
}

// ---- density maps, rate curves, laws ----------------------------------------

DensityMap map_from_json(const json& j, const std::string& path) {
  if (j.is_number()) return DensityMap::constant(as_number(j, path));
  Obj o(j, path);
  const std::string kind = o.string("map");
  DensityMap m;
  if (kind == "affine") {
    m = DensityMap::affine(o.number("a"), o.number("b"));
  } else {
    const double c = o.number("c");
    if (kind == "constant") m = DensityMap::constant(c);
    else if (kind == "reciprocal") m = DensityMap::reciprocal(c);
    else if (kind == "reciprocal_square") m = DensityMap::reciprocal_square(c);
    else if (kind == "reciprocal_sqrt") m = DensityMap::reciprocal_sqrt(c);
    else fail(o.at("map"), "unknown density map '" + kind +
                               "' (constant, reciprocal, reciprocal_square, reciprocal_sqrt, affine)");
  }
  o.finish();
  return m;
}

json map_to_json(const DensityMap& m) {
  if (m.kind() == DensityMap::Kind::Affine) return {{"map", "affine"}, {"a", m.c0()}, {"b", m.c1()}};
  return {{"map", std::string(to_string(m.kind()))}, {"c", m.c0()}};
}

RateCurve curve_from_json(const json& j, const std::string& path) {
  if (j.is_number()) return RateCurve::constant(as_number(j, path));
  Obj o(j, path);
  const std::string kind = o.string("curve");
  RateCurve c;
  try {
    if (kind == "constant") {
      c = RateCurve::constant(o.number("value"));
    } else if (kind == "exp_decay") {
      c = RateCurve::exp_decay(o.number("A"), o.number("B"), o.number("C"));
    } else if (kind == "piecewise_linear") {
      const json& pts = o.need("points");
      if (!pts.is_array()) fail(o.at("points"), "expected an array of [age, value] pairs");
      std::vector<std::pair<double, double>> v;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const std::string p = o.at("points") + "[" + std::to_string(i) + "]";
        const auto pair = number_array(pts[i], p);
        if (pair.size() != 2) fail(p, "expected [age, value]");
        v.emplace_back(pair[0], pair[1]);
      }
      c = RateCurve::piecewise_linear(std::move(v));
    } else {
      fail(o.at("curve"), "unknown curve '" + kind + "' (constant, exp_decay, piecewise_linear)");
    }
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    if (msg.starts_with(path)) throw;
    fail(path, msg);
  }
  o.finish();
  return c;
}

json curve_to_json(const RateCurve& c) {
  switch (c.kind()) {
    case RateCurve::Kind::Constant: return {{"curve", "constant"}, {"value", c.coefficients()[0]}};
    case RateCurve::Kind::ExpDecayToFloor:
      return {{"curve", "exp_decay"}, {"A", c.coefficients()[0]}, {"B", c.coefficients()[1]}, {"C", c.coefficients()[2]}};
    case RateCurve::Kind::PiecewiseLinear: {
      json pts = json::array();
      for (const auto& [a, v] : c.points()) pts.push_back({a, v});
      return {{"curve", "piecewise_linear"}, {"points", pts}};
    }
  }
  return nullptr;
}

StatusDemography status_demo_from_json(const json& j, const std::string& path) {
  Obj o(j, path);
  StatusDemography d;
  if (const json* net = o.find("net")) {
    if (o.find("birth") || o.find("death")) fail(path, "give either 'net' or 'birth'/'death', not both");
    d = StatusDemography::from_net(curve_from_json(*net, o.at("net")));
  } else {
    const json* b = o.find("birth");
    const json* dd = o.find("death");
    d = StatusDemography(b ? curve_from_json(*b, o.at("birth")) : RateCurve::constant(0.0),
                         dd ? curve_from_json(*dd, o.at("death")) : RateCurve::constant(0.0));
  }
  o.finish();
  return d;
}

json status_demo_to_json(const StatusDemography& d) {
  if (d.net_curve()) return {{"net", curve_to_json(*d.net_curve())}};
  return {{"birth", curve_to_json(d.birth())}, {"death", curve_to_json(d.death())}};
}

ClockMode mode_from(const std::string& s, const std::string& path) {
  if (s == "accrued") return ClockMode::Accrued;
  if (s == "requeue") return ClockMode::Requeue;
  fail(path, "unknown clock mode '" + s + "' (accrued, requeue)");
}

std::string mode_name(ClockMode m) { return m == ClockMode::Accrued ? "accrued" : "requeue"; }

}  // namespace

InteractionLaw law_from_json(const json& j, const std::string& path) {
  Obj o(j, path);
  const std::string kind = o.string("kind");
  std::optional<InteractionLaw> law;
  try {
    if (kind == "zero") {
      law = InteractionLaw::zero();
    } else if (kind == "exponential") {
      const json* rate = o.find("rate");
      const json* mean = o.find("mean");
      if ((rate == nullptr) == (mean == nullptr)) fail(path, "exponential law needs exactly one of 'rate', 'mean'");
      law = rate ? InteractionLaw::exponential_rate(map_from_json(*rate, o.at("rate")))
                 : InteractionLaw::exponential_mean(map_from_json(*mean, o.at("mean")));
    } else if (kind == "uniform") {
      law = InteractionLaw::uniform(map_from_json(o.need("upper"), o.at("upper")));
    } else if (kind == "pareto") {
      law = InteractionLaw::pareto(map_from_json(o.need("k"), o.at("k")), map_from_json(o.need("z"), o.at("z")));
    } else if (kind == "lognormal") {
      law = InteractionLaw::lognormal(map_from_json(o.need("mu"), o.at("mu")),
                                      map_from_json(o.need("sigma"), o.at("sigma")));
    } else if (kind == "table") {
      law::Table t;
      t.ages = number_array(o.need("ages"), o.at("ages"));
      t.x_grid = number_array(o.need("x_grid"), o.at("x_grid"));
      const json& h = o.need("hazard");
      if (!h.is_array()) fail(o.at("hazard"), "expected an array of rows");
      for (std::size_t i = 0; i < h.size(); ++i) {
        t.hazard.push_back(number_array(h[i], o.at("hazard") + "[" + std::to_string(i) + "]"));
      }
      law = InteractionLaw::table(std::move(t));
    } else {
      fail(o.at("kind"), "unknown law '" + kind + "' (zero, exponential, uniform, pareto, lognormal, table)");
    }
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    if (msg.starts_with(path)) throw;
    fail(path, msg);
  }
  o.finish();
  return *law;
}

json law_to_json(const InteractionLaw& law) {
  return std::visit(
      [](const auto& p) -> json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, law::Zero>) {
          return {{"kind", "zero"}};
        } else if constexpr (std::is_same_v<T, law::Exponential>) {
          return {{"kind", "exponential"}, {p.by_mean ? "mean" : "rate", map_to_json(p.param)}};
        } else if constexpr (std::is_same_v<T, law::Uniform>) {
          return {{"kind", "uniform"}, {"upper", map_to_json(p.upper)}};
        } else if constexpr (std::is_same_v<T, law::Pareto>) {
          return {{"kind", "pareto"}, {"k", map_to_json(p.k)}, {"z", map_to_json(p.z)}};
        } else if constexpr (std::is_same_v<T, law::LogNormal>) {
          return {{"kind", "lognormal"}, {"mu", map_to_json(p.mu)}, {"sigma", map_to_json(p.sigma)}};
        } else {
          return {{"kind", "table"}, {"ages", p.ages}, {"x_grid", p.x_grid}, {"hazard", p.hazard}};
        }
      },
      law.params());
}

BuiltModel model_from_json(const json& j, const std::string& path) {
  Obj o(j, path);
  if (const json* preset = o.find("preset")) {
    if (!preset->is_string()) fail(o.at("preset"), "expected a string");
    const std::string name = preset->get<std::string>();
    PresetParams overrides;
    if (const json* params = o.find("params")) {
      Obj po(*params, o.at("params"));
      for (const auto& [k, v] : params->items()) overrides[k] = as_number(po.need(k), po.at(k));
      po.finish();
    }
    o.finish();
    Preset p = make_preset(name, overrides, path);
    json params = json::object();
    for (const auto& [k, v] : p.params) params[k] = v;
    return {name, std::move(p.model), p.linear_phi_slope, std::pair{p.x0, p.y0}, p.bracket,
            {{"preset", name}, {"params", params}}};
  }

  const InteractionLaw ls = law_from_json(o.need("law_S"), o.at("law_S"));
  const InteractionLaw lm = law_from_json(o.need("law_M"), o.at("law_M"));
  DemographyRates rates;
  if (const json* demo = o.find("demography")) {
    Obj d(*demo, o.at("demography"));
    if (const json* s = d.find("S")) rates.predator[index(Status::Search)] = status_demo_from_json(*s, d.at("S"));
    if (const json* m = d.find("M")) rates.predator[index(Status::Manipulate)] = status_demo_from_json(*m, d.at("M"));
    d.finish();
  }
  {
    Obj p(o.need("prey"), o.at("prey"));
    rates.prey_gamma = p.number("gamma");
    rates.prey_beta = p.number("beta");
    p.finish();
  }
  DensityRange range;
  if (const json* r = o.find("x_range")) {
    const auto v = number_array(*r, o.at("x_range"));
    if (v.size() != 2 || !(v[0] > 0.0) || !(v[1] > v[0])) fail(o.at("x_range"), "expected [lo, hi] with 0 < lo < hi");
    range = {v[0], v[1]};
  }
  std::optional<double> slope;
  if (const json* lin = o.find("linear_phi")) slope = as_number(*lin, o.at("linear_phi"));
  o.finish();

  std::optional<ResponseModel> model;
  try {
    model.emplace(ls, lm, rates, range);
  } catch (const ConfigError& e) {
    fail(path, e.what());
  }
  json canon = {{"law_S", law_to_json(ls)},
                {"law_M", law_to_json(lm)},
                {"demography",
                 {{"S", status_demo_to_json(rates.of(Status::Search))},
                  {"M", status_demo_to_json(rates.of(Status::Manipulate))}}},
                {"prey", {{"gamma", rates.prey_gamma}, {"beta", rates.prey_beta}}},
                {"x_range", {range.lo, range.hi}}};
  if (slope) canon["linear_phi"] = *slope;
  return {"custom", std::move(*model), slope, std::nullopt, {1e-3, 1e3}, canon};
}

// ---- experiment config -------------------------------------------------------

ExperimentConfig parse_config(const json& j) {
  Obj root(j, "");
  ExperimentConfig cfg;
  const std::string cmd = root.string("command");
  if (cmd == "responses") cfg.command = Command::Responses;
  else if (cmd == "simulate") cfg.command = Command::Simulate;
  else if (cmd == "ode") cfg.command = Command::Ode;
  else if (cmd == "study") cfg.command = Command::Study;
  else fail(".command", "unknown command '" + cmd + "' (responses, simulate, ode, study)");

  const BuiltModel built = model_from_json(root.need("model"), ".model");
  cfg.model = built.canonical;

  if (const json* s = root.find("scaling")) {
    Obj so(*s, ".scaling");
    cfg.scaling = ScalingConfig{so.positive("K1"), so.positive("K2")};
    so.finish();
  }

  const bool needs_start = cfg.command != Command::Responses;
  if (const json* ini = root.find("initial")) {
    Obj io(*ini, ".initial");
    const auto def = built.start;
    cfg.initial.x0 = def ? io.number("x0", def->first) : io.number("x0");
    cfg.initial.y0 = def ? io.number("y0", def->second) : io.number("y0");
    if (const auto st = io.string_opt("status")) {
      if (*st == "S") cfg.initial.status = Status::Search;
      else if (*st == "M") cfg.initial.status = Status::Manipulate;
      else fail(io.at("status"), "expected \"S\" or \"M\"");
    }
    if (const json* al = io.find("age_law")) {
      const InteractionLaw law = law_from_json(*al, io.at("age_law"));
      if (!std::isfinite(law.a_max())) fail(io.at("age_law"), "initial ages must have a bounded support");
      cfg.initial.age_law = law_to_json(law);
    }
    io.finish();
  } else if (built.start) {
    cfg.initial.x0 = built.start->first;
    cfg.initial.y0 = built.start->second;
  } else if (needs_start) {
    fail(".initial", "required for a custom model");
  }
  if (!(cfg.initial.x0 >= 0.0)) fail(".initial.x0", "must be nonnegative");
  if (!(cfg.initial.y0 >= 0.0)) fail(".initial.y0", "must be nonnegative");

  if (const json* s = root.find("seed")) cfg.seed = as_unsigned(*s, ".seed");
  if (const json* t = root.find("threads")) {
    const auto n = as_unsigned(*t, ".threads");
    if (n < 1 || n > 1024) fail(".threads", "must be in [1, 1024]");
    cfg.threads = static_cast<unsigned>(n);
  }
  if (const auto out = root.string_opt("output")) {
    if (out->empty()) fail(".output", "must not be empty");
    cfg.output = *out;
  }

  // Only the section of the selected command is accepted.
  for (Command c : {Command::Responses, Command::Simulate, Command::Ode, Command::Study}) {
    if (c != cfg.command && j.contains(to_string(c))) {
      fail("." + std::string(to_string(c)), "section does not apply to command '" + cmd + "'");
    }
  }

  switch (cfg.command) {
    case Command::Responses: {
      if (const json* s = root.find("responses")) {
        Obj r(*s, ".responses");
        if (const json* g = r.find("grid")) cfg.responses.grid = number_array(*g, ".responses.grid");
        r.finish();
      }
      if (cfg.responses.grid.empty()) {
        for (int i = 0; i < 50; ++i) cfg.responses.grid.push_back(0.1 * std::pow(100.0, i / 49.0));
      }
      break;
    }
    case Command::Simulate: {
      if (!cfg.scaling) fail(".scaling", "required for simulate");
      Obj s(root.need("simulate"), ".simulate");
      auto& o = cfg.simulate;
      o.T = s.positive("T");
      o.samples = s.count("samples", o.samples);
      o.t_bins = s.count("t_bins", o.t_bins);
      o.age_bins = s.count("age_bins", o.age_bins);
      o.age_cap = s.number("age_cap", 0.0);
      if (o.age_cap < 0.0) fail(".simulate.age_cap", "must be nonnegative");
      if (const auto m = s.string_opt("mode")) o.mode = mode_from(*m, ".simulate.mode");
      o.max_population = s.count("max_population", o.max_population);
      o.replicas = s.count("replicas", o.replicas);
      o.age_snapshots = s.boolean("age_snapshots", false);
      s.finish();
      if (!built.model.has_laws()) fail(".model", "an analytic model cannot be simulated");
      break;
    }
    case Command::Ode: {
      Obj s(root.need("ode"), ".ode");
      auto& o = cfg.ode;
      o.T = s.positive("T");
      o.rel_tol = s.positive("rel_tol", o.rel_tol);
      o.abs_tol = s.positive("abs_tol", o.abs_tol);
      o.points = s.count("points", o.points);
      o.bracket = built.bracket;
      if (const json* b = s.find("bracket")) {
        const auto v = number_array(*b, ".ode.bracket");
        if (v.size() != 2 || !(v[0] > 0.0) || !(v[1] > v[0])) fail(".ode.bracket", "expected [lo, hi] with 0 < lo < hi");
        o.bracket = {v[0], v[1]};
      }
      o.scan = s.count("scan", o.scan);
      s.finish();
      if (!(cfg.initial.x0 > 0.0)) fail(".initial.x0", "must be positive for the ODE");
      break;
    }
    case Command::Study: {
      Obj s(root.need("study"), ".study");
      auto& o = cfg.study;
      o.T = s.positive("T");
      const json& lad = s.need("ladder");
      if (!lad.is_array() || lad.empty()) fail(".study.ladder", "expected a nonempty array of [K1, K2]");
      for (std::size_t i = 0; i < lad.size(); ++i) {
        const std::string p = ".study.ladder[" + std::to_string(i) + "]";
        const auto v = number_array(lad[i], p);
        if (v.size() != 2 || !(v[0] > 0.0) || !(v[1] > 0.0)) fail(p, "expected [K1, K2] with positive entries");
        if (i > 0 && !(v[0] / v[1] > o.ladder.back().lambda())) fail(p, "K1/K2 must increase strictly along the ladder");
        o.ladder.push_back({v[0], v[1]});
      }
      o.replicas = s.count("replicas", o.replicas);
      o.samples = s.count("samples", o.samples);
      o.t_bins = s.count("t_bins", o.t_bins);
      o.age_bins = s.count("age_bins", o.age_bins);
      o.age_cap = s.number("age_cap", 0.0);
      if (o.age_cap < 0.0) fail(".study.age_cap", "must be nonnegative");
      if (const auto m = s.string_opt("mode")) o.mode = mode_from(*m, ".study.mode");
      o.timings = s.boolean("timings", false);
      s.finish();
      if (!built.model.has_laws()) fail(".model", "an analytic model cannot be simulated");
      if (!(cfg.initial.x0 > 0.0) || !(cfg.initial.y0 > 0.0)) fail(".initial", "study needs positive x0 and y0");
      break;
    }
  }
  root.find(to_string(cfg.command));
  root.finish();
  return cfg;
}

json ExperimentConfig::to_json() const {
  json j = {{"command", std::string(to_string(command))}, {"model", model}};
  if (scaling) j["scaling"] = {{"K1", scaling->K1}, {"K2", scaling->K2}};
  json ini = {{"x0", initial.x0}, {"y0", initial.y0}, {"status", std::string(predprey::to_string(initial.status))}};
  if (!initial.age_law.is_null()) ini["age_law"] = initial.age_law;
  j["initial"] = ini;
  j["seed"] = seed;
  j["threads"] = threads;
  j["output"] = output;
  switch (command) {
    case Command::Responses: j["responses"] = {{"grid", responses.grid}}; break;
    case Command::Simulate:
      j["simulate"] = {{"T", simulate.T},
                       {"samples", simulate.samples},
                       {"t_bins", simulate.t_bins},
                       {"age_bins", simulate.age_bins},
                       {"age_cap", simulate.age_cap},
                       {"mode", mode_name(simulate.mode)},
                       {"max_population", simulate.max_population},
                       {"replicas", simulate.replicas},
                       {"age_snapshots", simulate.age_snapshots}};
      break;
    case Command::Ode:
      j["ode"] = {{"T", ode.T},
                  {"rel_tol", ode.rel_tol},
                  {"abs_tol", ode.abs_tol},
                  {"points", ode.points},
                  {"bracket", {ode.bracket.first, ode.bracket.second}},
                  {"scan", ode.scan}};
      break;
    case Command::Study: {
      json lad = json::array();
      for (const auto& s : study.ladder) lad.push_back({s.K1, s.K2});
      j["study"] = {{"T", study.T},
                    {"ladder", lad},
                    {"replicas", study.replicas},
                    {"samples", study.samples},
                    {"t_bins", study.t_bins},
                    {"age_bins", study.age_bins},
                    {"age_cap", study.age_cap},
                    {"mode", mode_name(study.mode)},
                    {"timings", study.timings}};
      break;
    }
  }
  return j;
}

ExperimentConfig parse_config_text(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

ConvergenceStudy make_study(const ExperimentConfig& cfg, const BuiltModel& model) {
  ConvergenceStudy s{model.name, model.model, cfg.initial.x0, cfg.initial.y0, cfg.study.ladder};
  s.T = cfg.study.T;
  s.replicas = cfg.study.replicas;
  s.samples = cfg.study.samples;
  s.t_bins = cfg.study.t_bins;
  s.age_bins = cfg.study.age_bins;
  s.age_cap = cfg.study.age_cap;
  s.seed_root = cfg.seed;
  s.threads = cfg.threads;
  s.mode = cfg.study.mode;
  s.timings = cfg.study.timings;
  return s;
}

}  // namespace predprey
