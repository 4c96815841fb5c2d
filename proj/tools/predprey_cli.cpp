// predprey: command-line front end.
//
//   predprey responses --preset holling2 --grid 0.5,1,2
//   predprey simulate  --preset holling2 --K1 100 --K2 10 --T 1 --seed 7
//   predprey ode       --preset lotka_volterra --T 50
//   predprey study     --preset holling2 --threads 4
//
// Exit codes: 0 success, 1 configuration error, 2 runtime abort.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "predprey/config.hpp"
#include "predprey/errors.hpp"
#include "predprey/io.hpp"
#include "predprey/ode.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace predprey;

namespace {

struct RuntimeAbort : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Flags {
  std::string config;
  std::optional<std::string> preset;
  std::vector<std::string> params;
  std::optional<std::string> grid;
  std::optional<double> K1, K2, T, x0, y0, rel_tol;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::string> out, mode, ladder;
  std::optional<std::size_t> replicas, samples, t_bins, age_bins;
  bool timings = false;
  bool dump_config = false;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

double parse_number(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw ConfigError(what + ": '" + s + "' is not a number");
  return v;
}

// The Holling II ladder with T = 5 used when `study` gets no ladder.
json default_ladder() { return json::array({{100.0, 10.0}, {1000.0, std::sqrt(1000.0)}, {10000.0, 100.0}}); }

json build_config_json(const std::string& command, const Flags& f) {
  json j = json::object();
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw ConfigError("cannot read config file " + f.config);
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError(f.config + ": invalid JSON: " + e.what());
    }
    if (!j.is_object()) throw ConfigError(".: expected an object");
    if (j.contains("command") && j["command"] != command) {
      throw ConfigError(".command: config is for '" + j["command"].dump() + "' but the subcommand is '" +
                        command + "'");
    }
  }
  j["command"] = command;

  if (f.preset) j["model"] = {{"preset", *f.preset}};
  if (!f.params.empty()) {
    if (!j.contains("model") || !j["model"].contains("preset")) {
      throw ConfigError("--param: only applies to a preset model");
    }
    for (const auto& kv : f.params) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--param: expected key=value, got '" + kv + "'");
      j["model"]["params"][kv.substr(0, eq)] = parse_number(kv.substr(eq + 1), "--param " + kv.substr(0, eq));
    }
  }
  if (!j.contains("model")) throw ConfigError(".model: required (give --preset or --config)");

  if (f.K1 || f.K2) {
    json& s = j["scaling"];
    if (!s.is_object()) s = json::object();
    if (f.K1) s["K1"] = *f.K1;
    if (f.K2) s["K2"] = *f.K2;
  }
  if (f.x0) j["initial"]["x0"] = *f.x0;
  if (f.y0) j["initial"]["y0"] = *f.y0;
  if (f.seed) j["seed"] = *f.seed;
  if (f.threads) j["threads"] = *f.threads;
  if (f.out) j["output"] = *f.out;

  json& sec = j[command];
  if (sec.is_null()) sec = json::object();
  if (f.grid) {
    json g = json::array();
    for (const auto& p : split(*f.grid, ',')) g.push_back(parse_number(p, "--grid"));
    sec["grid"] = g;
  }
  if (f.T) sec["T"] = *f.T;
  if (f.rel_tol) sec["rel_tol"] = *f.rel_tol;
  if (f.replicas) sec["replicas"] = *f.replicas;
  if (f.samples) sec["samples"] = *f.samples;
  if (f.t_bins) sec["t_bins"] = *f.t_bins;
  if (f.age_bins) sec["age_bins"] = *f.age_bins;
  if (f.mode) sec["mode"] = *f.mode;
  if (f.timings) sec["timings"] = true;
  if (f.ladder) {
    json lad = json::array();
    for (const auto& rung : split(*f.ladder, ',')) {
      const auto k = split(rung, ':');
      if (k.size() != 2) throw ConfigError("--ladder: expected K1:K2 pairs, got '" + rung + "'");
      lad.push_back({parse_number(k[0], "--ladder"), parse_number(k[1], "--ladder")});
    }
    sec["ladder"] = lad;
  }
  if (command == "study" && f.config.empty()) {
    if (!sec.contains("ladder")) sec["ladder"] = default_ladder();
    if (!sec.contains("T")) sec["T"] = 5.0;
  }
  return j;
}

void write(const fs::path& dir, const std::string& name, const std::string& content) {
  io::write_atomic(dir / name, content);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

int run_responses(const ExperimentConfig& cfg, const BuiltModel& built, const fs::path& dir) {
  const auto rows = response_table(built.model, cfg.responses.grid);
  write(dir, "responses.csv", response_table_csv(rows));
  write(dir, "assumptions.json", dump(check_assumptions(built.model, cfg.responses.grid).to_json()));
  for (const auto& r : rows) {
    if (!r.ok) throw RuntimeAbort("x = " + io::format_double(r.x) + ": " + r.error);
  }
  return 0;
}

std::vector<double> age_edges_for(const ResponseModel& model, double x0, double age_cap, std::size_t bins) {
  const double cap = age_cap > 0.0 ? age_cap : default_age_cap(model, std::max(x0, 1e-12));
  return uniform_age_edges(cap, bins);
}

int run_simulate(const ExperimentConfig& cfg, const BuiltModel& built, const fs::path& dir) {
  const auto& s = cfg.simulate;
  SimulationConfig sc;
  sc.scaling = *cfg.scaling;
  sc.initial.x0 = cfg.initial.x0;
  sc.initial.y0 = cfg.initial.y0;
  sc.initial.status = cfg.initial.status;
  if (!cfg.initial.age_law.is_null()) sc.initial.age_law = law_from_json(cfg.initial.age_law, ".initial.age_law");
  sc.T = s.T;
  sc.recording.sample_times = uniform_grid(s.T, s.samples);
  sc.recording.t_bins = s.t_bins;
  sc.recording.age_edges = age_edges_for(built.model, cfg.initial.x0, s.age_cap, s.age_bins);
  sc.recording.age_snapshots = s.age_snapshots;
  sc.options.mode = s.mode;
  sc.options.max_population = s.max_population;

  auto report = [](const SimulationResult& r) {
    json d = {{"counters", r.counters.to_json()},
              {"final_prey", r.final_prey},
              {"max_clock_error", r.diagnostics.max_clock_error},
              {"age_support_violations", r.diagnostics.age_support_violations},
              {"integrated_predators", r.diagnostics.integrated_predators},
              {"aborted", r.diagnostics.aborted},
              {"extinct", r.diagnostics.extinct}};
    if (!r.diagnostics.message.empty()) d["message"] = r.diagnostics.message;
    return d;
  };

  if (s.replicas == 1) {
    const SimulationResult r =
        simulate(init(sc.scaling, sc.initial, cfg.seed), built.model, sc.scaling, sc.T, sc.recording, sc.options);
    write(dir, "trajectory.csv", r.trajectory.to_csv());
    write(dir, "occupation.json", dump(r.occupation.to_json()));
    write(dir, "events.json", dump(report(r)));
    if (r.diagnostics.aborted) throw RuntimeAbort(r.diagnostics.message);
    return 0;
  }

  const ReplicaSummary sum = run_replicas(built.model, sc, s.replicas, cfg.seed, cfg.threads);
  write(dir, "trajectory.csv", sum.replicas.front().trajectory.to_csv());
  write(dir, "occupation.json", dump(sum.mean_occupation.to_json()));
  json ev = json::array();
  for (const auto& r : sum.replicas) ev.push_back(report(r));
  write(dir, "events.json", dump({{"replicas", ev}, {"aborted", sum.aborted}}));
  std::string csv = "t,mean_xi,var_xi,mean_y,var_y\n";
  for (std::size_t i = 0; i < sum.t.size(); ++i) {
    csv += io::format_double(sum.t[i]) + "," + io::format_double(sum.mean_xi[i]) + "," +
           io::format_double(sum.var_xi[i]) + "," + io::format_double(sum.mean_y[i]) + "," +
           io::format_double(sum.var_y[i]) + "\n";
  }
  write(dir, "summary.csv", csv);
  if (sum.aborted == sum.replicas.size()) throw RuntimeAbort("every replica aborted");
  return 0;
}

int run_ode(const ExperimentConfig& cfg, const BuiltModel& built, const fs::path& dir) {
  const auto& o = cfg.ode;
  const LimitSystem sys(built.model, built.linear_phi_slope);
  OdeOptions opt;
  opt.rel_tol = o.rel_tol;
  opt.abs_tol = o.abs_tol;
  opt.grid = uniform_grid(o.T, o.points);
  opt.conservation = built.linear_phi_slope.has_value();
  const OdeSolution sol = integrate(sys, cfg.initial.x0, cfg.initial.y0, o.T, opt);
  write(dir, "ode.csv", sol.to_csv());

  // Scan log-spaced sub-brackets for sign changes of psi.
  json eq = json::array();
  const double lo = std::log(o.bracket.first), hi = std::log(o.bracket.second);
  std::optional<double> last;
  for (std::size_t i = 0; i < o.scan; ++i) {
    const double a = std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(o.scan));
    const double b = std::exp(lo + (hi - lo) * static_cast<double>(i + 1) / static_cast<double>(o.scan));
    std::optional<Equilibrium> e;
    try {
      e = find_equilibrium(sys, a, b);
    } catch (const DomainError&) {
      continue;
    }
    if (!e || (last && std::abs(e->x - *last) <= 1e-9 * (1.0 + *last))) continue;
    last = e->x;
    eq.push_back(e->to_json());
  }

  json report = {{"equilibria", eq},
                 {"steps", sol.steps.size()},
                 {"rejected", sol.rejected},
                 {"aborted", sol.aborted},
                 {"t_end", sol.t_end}};
  if (!sol.message.empty()) report["message"] = sol.message;
  if (opt.conservation && !sol.conservation.empty()) {
    const double L0 = sol.conservation.front();
    report["conservation"] = {{"L0", L0},
                              {"max_drift", sol.max_conservation_drift()},
                              {"tolerance", 1e-6 * (1.0 + std::abs(L0))}};
  }
  if (const auto period = detect_period(sol)) report["period"] = *period;
  write(dir, "equilibria.json", dump(report));
  if (sol.aborted) throw RuntimeAbort("ODE integration aborted at t = " + io::format_double(sol.t_end) + ": " +
                                      sol.message);
  return 0;
}

int run_study_cmd(const ExperimentConfig& cfg, const BuiltModel& built, const fs::path& dir) {
  const ConvergenceStudy study = make_study(cfg, built);
  const StudyReport rep = run_study(study);
  write(dir, "study.json", dump(rep.to_json(study)));
  write(dir, "study.csv", rep.to_csv());
  if (rep.ode_aborted) throw RuntimeAbort("limit ODE aborted; study errors are not meaningful");
  return 0;
}

void report_error(bool as_json, const std::string& kind, const std::string& message) {
  if (as_json) {
    std::cerr << json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << "\n";
  } else {
    std::cerr << "predprey: " << kind << " error: " << message << "\n";
  }
}

void add_options(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON experiment config")->check(CLI::ExistingFile);
  sub->add_option("--preset", f.preset, "built-in model");
  sub->add_option("--param", f.params, "preset parameter override key=value (repeatable)");
  sub->add_option("--K1", f.K1, "prey scale");
  sub->add_option("--K2", f.K2, "predator scale");
  sub->add_option("--T", f.T, "macroscopic horizon");
  sub->add_option("--x0", f.x0, "initial prey density");
  sub->add_option("--y0", f.y0, "initial predator density");
  sub->add_option("--seed,--seed-root", f.seed, "64-bit seed");
  sub->add_option("--threads", f.threads, "worker threads");
  sub->add_option("--out", f.out, "output directory");
  sub->add_flag("--dump-config", f.dump_config, "print the resolved config and exit");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Individual-based prey-predator model with age-structured predators"};
  app.require_subcommand(1);
  bool json_errors = false;
  app.add_flag("--json-errors", json_errors, "machine-readable errors on stderr");

  Flags f;
  auto* responses = app.add_subcommand("responses", "tabulate phi and psi");
  auto* sim = app.add_subcommand("simulate", "one individual-based run");
  auto* ode = app.add_subcommand("ode", "integrate the limit system");
  auto* study = app.add_subcommand("study", "convergence ladder");
  for (auto* sub : {responses, sim, ode, study}) {
    add_options(sub, f);
    sub->add_flag("--json-errors", json_errors, "machine-readable errors on stderr");
  }
  responses->add_option("--grid", f.grid, "comma-separated x values");
  ode->add_option("--rel-tol", f.rel_tol, "relative tolerance");
  for (auto* sub : {sim, study}) {
    sub->add_option("--replicas", f.replicas, "independent replicas");
    sub->add_option("--mode", f.mode, "clock mode: accrued or requeue");
    sub->add_option("--samples", f.samples, "trajectory samples (grid has samples + 1 points)");
    sub->add_option("--t-bins", f.t_bins, "occupation time bins");
    sub->add_option("--age-bins", f.age_bins, "occupation age bins");
  }
  study->add_option("--ladder", f.ladder, "K1:K2 pairs, comma-separated");
  study->add_flag("--timings", f.timings, "record wall-clock seconds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error(json_errors, "config", e.what());
    return 1;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  ExperimentConfig cfg;
  std::optional<BuiltModel> built;
  try {
    cfg = parse_config(build_config_json(command, f));
    built.emplace(model_from_json(cfg.model));
  } catch (const ConfigError& e) {
    report_error(json_errors, "config", e.what());
    return 1;
  } catch (const std::exception& e) {
    report_error(json_errors, "config", e.what());
    return 1;
  }
  if (f.dump_config) {
    std::cout << dump(cfg.to_json());
    return 0;
  }

  try {
    const fs::path dir = cfg.output;
    fs::create_directories(dir);
    write(dir, "config.json", dump(cfg.to_json()));
    switch (cfg.command) {
      case Command::Responses: return run_responses(cfg, *built, dir);
      case Command::Simulate: return run_simulate(cfg, *built, dir);
      case Command::Ode: return run_ode(cfg, *built, dir);
      case Command::Study: return run_study_cmd(cfg, *built, dir);
    }
  } catch (const ConfigError& e) {
    report_error(json_errors, "config", e.what());
    return 1;
  } catch (const std::exception& e) {
    report_error(json_errors, "runtime", e.what());
    return 2;
  }
  return 0;
}
