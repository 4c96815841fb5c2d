#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "predprey/harness.hpp"
#include "predprey/ibm.hpp"
#include "predprey/presets.hpp"

namespace predprey {

enum class Command { Responses, Simulate, Ode, Study };

std::string_view to_string(Command c);

struct InitialSpec {
  double x0 = 1.0;
  double y0 = 1.0;
  Status status = Status::Manipulate;
  nlohmann::json age_law;  ///< null when every predator starts at age 0
  friend bool operator==(const InitialSpec&, const InitialSpec&) = default;
};

struct ResponsesSection {
  std::vector<double> grid;
  friend bool operator==(const ResponsesSection&, const ResponsesSection&) = default;
};

struct SimulateSection {
  double T = 0.0;
  std::size_t samples = 100;
  std::size_t t_bins = 10;
  std::size_t age_bins = 20;
  double age_cap = 0.0;  ///< 0 means default_age_cap at x0
  ClockMode mode = ClockMode::Accrued;
  std::uint64_t max_population = 100'000'000;
  std::size_t replicas = 1;
  bool age_snapshots = false;
  friend bool operator==(const SimulateSection&, const SimulateSection&) = default;
};

struct OdeSection {
  double T = 0.0;
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  std::size_t points = 200;
  std::pair<double, double> bracket{0.0, 0.0};  ///< {0, 0}: the preset's window
  std::size_t scan = 64;                        ///< sub-brackets scanned for roots
  friend bool operator==(const OdeSection&, const OdeSection&) = default;
};

struct StudySection {
  double T = 0.0;
  std::vector<ScalingConfig> ladder;
  std::size_t replicas = 20;
  std::size_t samples = 100;
  std::size_t t_bins = 10;
  std::size_t age_bins = 20;
  double age_cap = 0.0;
  ClockMode mode = ClockMode::Accrued;
  bool timings = false;
  friend bool operator==(const StudySection&, const StudySection&) = default;
};

/// Fully validated experiment with defaults filled in. `model` holds the
/// canonical model description (see model_from_json).
struct ExperimentConfig {
  Command command = Command::Responses;
  nlohmann::json model;
  std::optional<ScalingConfig> scaling;
  InitialSpec initial;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string output = ".";
  ResponsesSection responses;
  SimulateSection simulate;
  OdeSection ode;
  StudySection study;

  /// Canonical JSON; parse_config(to_json()) reproduces this config.
  nlohmann::json to_json() const;
  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Strict parse: unknown keys and wrong types are rejected with the JSON
/// path in the message (".simulate.T: required").
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig parse_config_text(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// A model ready to run, with its canonical JSON description.
struct BuiltModel {
  std::string name;  ///< preset name or "custom"
  ResponseModel model;
  std::optional<double> linear_phi_slope;
  std::optional<std::pair<double, double>> start;  ///< preset suggestion
  std::pair<double, double> bracket{1e-3, 1e3};
  nlohmann::json canonical;
};

/// Accepts {"preset": name, "params": {...}} or an explicit description
/// {"law_S", "law_M", "demography", "prey", "x_range", "linear_phi"}.
BuiltModel model_from_json(const nlohmann::json& j, const std::string& path = ".model");

InteractionLaw law_from_json(const nlohmann::json& j, const std::string& path);
nlohmann::json law_to_json(const InteractionLaw& law);

ConvergenceStudy make_study(const ExperimentConfig& cfg, const BuiltModel& model);

}  // namespace predprey
