#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "predprey/hazards.hpp"
#include "predprey/random.hpp"
#include "predprey/responses.hpp"

namespace predprey {

/// Population scales: prey at K1, predators at K2. Interactions run on the
/// fast clock, demography is slowed down by lambda = K1 / K2.
struct ScalingConfig {
  double K1 = 1.0;
  double K2 = 1.0;

  double lambda() const { return K1 / K2; }
  void validate() const;
  friend bool operator==(const ScalingConfig&, const ScalingConfig&) = default;
};

/// One predator in the simulator. Its status-switch clock fires when the
/// hazard integrated along its age (at the prevailing prey densities)
/// reaches an Exp(1) threshold.
struct PredatorRecord {
  Status status = Status::Manipulate;
  double entry_time = 0.0;   ///< fast time at which the current status began
  double threshold = 0.0;    ///< Exp(1) draw for the current spell
  double accrued = 0.0;      ///< hazard consumed up to accrued_at
  double accrued_at = 0.0;
  double scheduled = kInf;   ///< predicted switch time under the current density
  double flushed_at = 0.0;   ///< occupation recorded up to this fast time
  std::uint64_t stamp = 0;   ///< invalidates stale queue entries
  std::uint32_t live_pos = 0;
  bool alive = false;

  double age(double t) const { return t - entry_time; }
};

enum class EventType : std::uint8_t {
  SearchEnd,
  ManipulateEnd,
  PredatorBirth,
  PredatorDeath,
  PreyBirth,
  PreyDeath,
  Thinned,      ///< rejected demographic proposal
  Extinct,      ///< no event can ever happen again
};

inline constexpr std::size_t kEventTypes = 8;

std::string_view to_string(EventType t);

struct Event {
  EventType type = EventType::Extinct;
  double time = kInf;
  std::uint32_t slot = 0;
};

struct EventCounters {
  std::array<std::uint64_t, kEventTypes> by_type{};
  std::uint64_t suppressed_predations = 0;

  std::uint64_t operator[](EventType t) const { return by_type[static_cast<std::size_t>(t)]; }
  nlohmann::json to_json() const;
  friend bool operator==(const EventCounters&, const EventCounters&) = default;
};

/// How the per-predator clocks are kept when the prey count changes.
enum class ClockMode {
  Accrued,  ///< keep thresholds, bank the hazard consumed so far
  Requeue,  ///< reference mode: redraw every clock from scratch
};

/// Initial predator configuration: every predator starts in `status`; ages
/// are 0 or, when `age_law` is set, drawn from that bounded-support law.
struct InitialCondition {
  double x0 = 1.0;
  double y0 = 1.0;
  Status status = Status::Manipulate;
  std::optional<InteractionLaw> age_law;
};

struct SimState {
  std::int64_t prey_count = 0;
  std::vector<PredatorRecord> records;   ///< slots; dead slots are recycled
  std::vector<std::uint32_t> live;       ///< dense list of live slots
  std::vector<std::uint32_t> free_slots;
  double fast_time = 0.0;
  Rng rng;
  EventCounters counters;

  std::size_t predator_count() const { return live.size(); }
  std::size_t count(Status s) const;
};

/// X(0) = floor(K1 x0) prey and floor(K2 y0) predators with fresh clocks.
SimState init(const ScalingConfig& scaling, const InitialCondition& initial, std::uint64_t seed);

/// Histogram over (macroscopic time bin, age bin) of the time-integrated
/// scaled predator measure, one per status. The last age bin is the
/// overflow [age_edges.back(), inf).
class OccupationMeasure {
 public:
  OccupationMeasure() = default;
  OccupationMeasure(double T, std::size_t t_bins, std::vector<double> age_edges);

  /// Adds the path of one predator of `status` over fast times [tau0, tau1]
  /// with age age0 at tau0 (ages grow at unit rate in fast time).
  void add_segment(Status status, double tau0, double tau1, double age0, double lambda,
                   double weight);

  double T() const { return T_; }
  std::size_t t_bins() const { return t_bins_; }
  std::size_t age_bins() const { return age_edges_.size(); }  ///< incl. overflow
  const std::vector<double>& age_edges() const { return age_edges_; }
  std::vector<double> t_edges() const;

  double& mass(Status s, std::size_t t, std::size_t a) { return mass_[index(s)][t * age_bins() + a]; }
  double mass(Status s, std::size_t t, std::size_t a) const {
    return mass_[index(s)][t * age_bins() + a];
  }
  double total_mass() const;

  void accumulate(const OccupationMeasure& other, double weight = 1.0);
  nlohmann::json to_json() const;

 private:
  double T_ = 0.0;
  std::size_t t_bins_ = 0;
  std::vector<double> age_edges_;
  std::array<std::vector<double>, 2> mass_;
};

struct RecordingOptions {
  std::vector<double> sample_times;  ///< macroscopic, strictly increasing
  std::size_t t_bins = 10;
  std::vector<double> age_edges;     ///< 0 = e_0 < e_1 < ... < a_cap
  bool age_snapshots = false;
};

/// n+1 evenly spaced sample times on [0, T].
std::vector<double> uniform_grid(double T, std::size_t n);

/// n evenly spaced age bins on [0, a_cap].
std::vector<double> uniform_age_edges(double a_cap, std::size_t n);

/// Age where the survival of both laws drops below `level` at density x
/// (the default overflow threshold for age histograms).
double default_age_cap(const ResponseModel& model, double x, double level = 1e-6);

struct Trajectory {
  std::vector<double> t;
  std::vector<double> xi;
  std::vector<double> y_total;
  std::vector<double> y_search;
  std::vector<double> y_manipulate;
  /// Optional per-sample scaled age histograms [sample][status][age bin].
  std::vector<std::array<std::vector<double>, 2>> age_snapshots;

  std::string to_csv() const;
};

struct SimulationOptions {
  ClockMode mode = ClockMode::Accrued;
  std::uint64_t max_population = 100'000'000;
};

struct SimDiagnostics {
  double max_clock_error = 0.0;      ///< |accrued - threshold| at switches
  std::uint64_t age_support_violations = 0;
  double integrated_predators = 0.0; ///< int_0^T Y^K_total(s) ds
  bool aborted = false;
  bool extinct = false;
  std::string message;
};

/// Event-driven exact simulator of the scaled prey–predator process.
class Simulator {
 public:
  Simulator(const ResponseModel& model, ScalingConfig scaling, SimState state,
            SimulationOptions options = {});

  /// Draws the next event. Consumes randomness but leaves the population
  /// untouched; the returned event must be passed to apply_event().
  Event next_event();
  void apply_event(const Event& e);

  /// Hooks the occupation recorder; segments are flushed lazily per
  /// predator. Pass nullptr to disable.
  void attach_occupation(OccupationMeasure* occ) { occupation_ = occ; }
  /// Flushes every predator's occupation path up to fast time t.
  void flush_occupation(double t);
  /// Advances the clock to t (no event in between) and checks ages.
  void advance_to(double t);

  const SimState& state() const { return state_; }
  const ScalingConfig& scaling() const { return scaling_; }
  const SimDiagnostics& diagnostics() const { return diag_; }
  SimDiagnostics& diagnostics() { return diag_; }
  double density() const;
  const PredatorRecord& record(std::uint32_t slot) const { return state_.records[slot]; }

 private:
  struct Entry {
    double time;
    std::uint32_t slot;
    std::uint64_t stamp;
    bool operator>(const Entry& o) const {
      if (time != o.time) return time > o.time;
      return slot > o.slot;
    }
  };

  const InteractionLaw& law(Status s) const { return model_->law(s); }
  double law_density() const;
  void schedule(std::uint32_t slot);
  void start_spell(std::uint32_t slot, Status s, double t);
  void flush(std::uint32_t slot, double t);
  std::uint32_t add_predator(Status s, double t);
  void remove_predator(std::uint32_t slot);
  void on_density_change(double x_old);
  void check_age(const PredatorRecord& r, double t);
  void maybe_rebuild_queue();
  double poisson_rate() const;

  const ResponseModel* model_;
  ScalingConfig scaling_;
  SimState state_;
  SimulationOptions options_;
  SimDiagnostics diag_;
  OccupationMeasure* occupation_ = nullptr;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue_;
  bool density_dependent_[2] = {false, false};
  double birth_bound_ = 0.0;
  double death_bound_ = 0.0;
};

struct SimulationResult {
  Trajectory trajectory;
  OccupationMeasure occupation;
  EventCounters counters;
  SimDiagnostics diagnostics;
  std::int64_t final_prey = 0;
};

/// Runs the event loop up to fast time lambda * T, sampling the trajectory
/// on recording.sample_times (defaulting to 101 points) and accumulating
/// the occupation measure.
SimulationResult simulate(SimState state, const ResponseModel& model, const ScalingConfig& scaling,
                          double T, const RecordingOptions& recording,
                          const SimulationOptions& options = {});

struct SimulationConfig {
  ScalingConfig scaling;
  InitialCondition initial;
  double T = 1.0;
  RecordingOptions recording;
  SimulationOptions options;
};

struct ReplicaSummary {
  std::vector<SimulationResult> replicas;  ///< in replica-index order
  std::vector<double> t;
  std::vector<double> mean_xi, var_xi, mean_y, var_y;
  OccupationMeasure mean_occupation;
  std::size_t aborted = 0;
};

/// n independent replicas with seeds derive_seed(seed_root, i).
ReplicaSummary run_replicas(const ResponseModel& model, const SimulationConfig& config,
                            std::size_t n, std::uint64_t seed_root, unsigned threads = 1);

}  // namespace predprey
