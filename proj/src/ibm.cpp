#include "predprey/ibm.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "predprey/errors.hpp"
#include "predprey/io.hpp"

namespace predprey {

namespace {

std::int64_t scaled_floor(double K, double v) {
  const double p = K * v;
  // Absorbs representation error in products such as 10 * 0.3.
  return static_cast<std::int64_t>(std::floor(p + 1e-9 * std::max(1.0, p)));
}

}  // namespace

void ScalingConfig::validate() const {
  if (!(K1 > 0.0) || !(K2 > 0.0) || !std::isfinite(K1) || !std::isfinite(K2)) {
    throw ConfigError("scaling parameters K1 and K2 must be positive and finite");
  }
}

std::string_view to_string(EventType t) {
  switch (t) {
    case EventType::SearchEnd: return "search_end";
    case EventType::ManipulateEnd: return "manipulate_end";
    case EventType::PredatorBirth: return "predator_birth";
    case EventType::PredatorDeath: return "predator_death";
    case EventType::PreyBirth: return "prey_birth";
    case EventType::PreyDeath: return "prey_death";
    case EventType::Thinned: return "thinned";
    case EventType::Extinct: return "extinct";
  }
  return "?";
}

nlohmann::json EventCounters::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (std::size_t i = 0; i < kEventTypes; ++i) {
    j[std::string(to_string(static_cast<EventType>(i)))] = by_type[i];
  }
  j["suppressed_predations"] = suppressed_predations;
  return j;
}

std::size_t SimState::count(Status s) const {
  std::size_t n = 0;
  for (auto slot : live) n += records[slot].status == s ? 1 : 0;
  return n;
}

SimState init(const ScalingConfig& scaling, const InitialCondition& initial, std::uint64_t seed) {
  scaling.validate();
  if (!(initial.x0 >= 0.0) || !(initial.y0 >= 0.0)) {
    throw ConfigError("initial densities x0 and y0 must be nonnegative");
  }
  if (initial.age_law && !std::isfinite(initial.age_law->a_max())) {
    throw ConfigError("initial ages must have a bounded support");
  }
  SimState st;
  st.rng.seed(seed);
  st.prey_count = scaled_floor(scaling.K1, initial.x0);
  const auto n = static_cast<std::size_t>(scaled_floor(scaling.K2, initial.y0));
  st.records.resize(n);
  st.live.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& r = st.records[i];
    double age = 0.0;
    if (initial.age_law) age = initial.age_law->sample_at(initial.age_law->range().clamp(1.0), st.rng);
    r.status = initial.status;
    r.entry_time = -age;
    r.threshold = standard_exponential(st.rng);
    r.alive = true;
    r.live_pos = static_cast<std::uint32_t>(i);
    st.live[i] = static_cast<std::uint32_t>(i);
  }
  return st;
}

// ---- OccupationMeasure -----------------------------------------------------

OccupationMeasure::OccupationMeasure(double T, std::size_t t_bins, std::vector<double> age_edges)
    : T_(T), t_bins_(t_bins), age_edges_(std::move(age_edges)) {
  if (!(T > 0.0) || t_bins == 0) throw ConfigError("occupation measure needs T > 0 and t_bins >= 1");
  if (age_edges_.empty() || age_edges_.front() != 0.0 ||
      std::adjacent_find(age_edges_.begin(), age_edges_.end(),
                         [](double a, double b) { return !(a < b); }) != age_edges_.end()) {
    throw ConfigError("age edges must start at 0 and increase strictly");
  }
  for (auto& m : mass_) m.assign(t_bins_ * age_bins(), 0.0);
}

std::vector<double> OccupationMeasure::t_edges() const {
  std::vector<double> e(t_bins_ + 1);
  for (std::size_t i = 0; i <= t_bins_; ++i) e[i] = T_ * static_cast<double>(i) / static_cast<double>(t_bins_);
  return e;
}

void OccupationMeasure::add_segment(Status status, double tau0, double tau1, double age0,
                                    double lambda, double weight) {
  const double end = std::min(tau1, lambda * T_);
  if (!(end > tau0) || t_bins_ == 0) return;
  double cur = std::max(tau0, 0.0);
  if (!(end > cur)) return;
  const double bin_len = T_ / static_cast<double>(t_bins_);
  auto ti = static_cast<std::size_t>(std::floor(cur / lambda / bin_len));
  if (ti >= t_bins_) ti = t_bins_ - 1;
  // Bin ti must satisfy lambda * ti * bin_len <= cur.
  while (ti > 0 && lambda * bin_len * static_cast<double>(ti) > cur) --ti;
  while (ti + 1 < t_bins_ && lambda * bin_len * static_cast<double>(ti + 1) <= cur) ++ti;
  const double a_cur = age0 + (cur - tau0);
  auto ai = static_cast<std::size_t>(std::upper_bound(age_edges_.begin(), age_edges_.end(), a_cur) -
                                     age_edges_.begin());
  ai = ai == 0 ? 0 : ai - 1;
  auto& m = mass_[index(status)];
  const std::size_t nb = age_bins();
  while (cur < end) {
    const double t_next = ti + 1 < t_bins_ ? lambda * bin_len * static_cast<double>(ti + 1) : kInf;
    const double a_next = ai + 1 < nb ? tau0 + (age_edges_[ai + 1] - age0) : kInf;
    const double nxt = std::min({end, t_next, a_next});
    if (nxt > cur) m[ti * nb + ai] += (nxt - cur) * weight / lambda;
    if (nxt >= end) break;
    if (nxt >= t_next) ++ti;
    if (nxt >= a_next) ++ai;
    cur = std::max(cur, nxt);
  }
}

double OccupationMeasure::total_mass() const {
  double s = 0.0;
  for (const auto& m : mass_) {
    for (double v : m) s += v;
  }
  return s;
}

void OccupationMeasure::accumulate(const OccupationMeasure& other, double weight) {
  if (mass_[0].empty()) {
    *this = other;
    for (auto& m : mass_) {
      for (double& v : m) v *= weight;
    }
    return;
  }
  if (other.t_bins_ != t_bins_ || other.age_edges_ != age_edges_) {
    throw ContractError("occupation measures with different binning");
  }
  for (std::size_t s = 0; s < 2; ++s) {
    for (std::size_t i = 0; i < mass_[s].size(); ++i) mass_[s][i] += weight * other.mass_[s][i];
  }
}

nlohmann::json OccupationMeasure::to_json() const {
  nlohmann::json age = nlohmann::json::array();
  for (double e : age_edges_) age.push_back(e);
  age.push_back("inf");
  nlohmann::json by_status = nlohmann::json::object();
  for (Status s : {Status::Search, Status::Manipulate}) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t t = 0; t < t_bins_; ++t) {
      nlohmann::json row = nlohmann::json::array();
      for (std::size_t a = 0; a < age_bins(); ++a) row.push_back(mass(s, t, a));
      rows.push_back(std::move(row));
    }
    by_status[std::string(to_string(s))] = std::move(rows);
  }
  return {{"t_bins", t_edges()}, {"age_bins", age}, {"mass", by_status}};
}

std::vector<double> uniform_grid(double T, std::size_t n) {
  std::vector<double> g(n + 1);
  for (std::size_t i = 0; i <= n; ++i) g[i] = T * static_cast<double>(i) / static_cast<double>(n);
  g.back() = T;
  return g;
}

std::vector<double> uniform_age_edges(double a_cap, std::size_t n) {
  std::vector<double> e(n + 1);
  for (std::size_t i = 0; i <= n; ++i) e[i] = a_cap * static_cast<double>(i) / static_cast<double>(n);
  return e;
}

double default_age_cap(const ResponseModel& model, double x, double level) {
  x = model.x_range().clamp(x);
  double cap = 0.0;
  for (Status s : {Status::Search, Status::Manipulate}) {
    const auto& law = model.law(s);
    if (law.is_zero()) continue;
    double a = law.a_max();
    if (!std::isfinite(a)) a = law.age_after(x, 0.0, -std::log(level));
    if (std::isfinite(a)) cap = std::max(cap, a);
  }
  return cap > 0.0 ? cap : 1.0;
}

std::string Trajectory::to_csv() const {
  std::string out = "t,xi,y_total,y_search,y_manipulate\n";
  for (std::size_t i = 0; i < t.size(); ++i) {
    out += io::format_double(t[i]) + ',' + io::format_double(xi[i]) + ',' +
           io::format_double(y_total[i]) + ',' + io::format_double(y_search[i]) + ',' +
           io::format_double(y_manipulate[i]) + '\n';
  }
  return out;
}

// ---- Simulator -------------------------------------------------------------

Simulator::Simulator(const ResponseModel& model, ScalingConfig scaling, SimState state,
                     SimulationOptions options)
    : model_(&model), scaling_(scaling), state_(std::move(state)), options_(options) {
  scaling_.validate();
  if (!model.has_laws()) throw ConfigError("model has no interaction laws and cannot be simulated");
  if (law(Status::Search).is_zero()) throw ConfigError("the simulator needs a non-degenerate search law");
  for (Status s : {Status::Search, Status::Manipulate}) {
    density_dependent_[index(s)] = law(s).depends_on_density();
  }
  birth_bound_ = model.rates().birth_bound();
  death_bound_ = model.rates().death_bound();
  for (auto slot : state_.live) {
    auto& r = state_.records[slot];
    r.accrued = 0.0;
    r.accrued_at = state_.fast_time;
    r.flushed_at = state_.fast_time;
    if (law(r.status).is_zero()) {
      start_spell(slot, complement(r.status), state_.fast_time);
      continue;
    }
    if (r.age(state_.fast_time) >= law(r.status).a_max()) {
      throw ConfigError("initial predator age outside the support of its status law");
    }
    schedule(slot);
  }
}

double Simulator::density() const {
  return static_cast<double>(state_.prey_count) / scaling_.K1;
}

double Simulator::law_density() const { return model_->x_range().clamp(density()); }

void Simulator::schedule(std::uint32_t slot) {
  auto& r = state_.records[slot];
  ++r.stamp;
  const double t = state_.fast_time;
  const double budget = std::max(0.0, r.threshold - r.accrued);
  const double a1 = law(r.status).age_after(law_density(), r.age(t), budget);
  r.scheduled = r.entry_time + a1;
  if (std::isfinite(r.scheduled)) {
    queue_.push({std::max(r.scheduled, t), slot, r.stamp});
  }
}

void Simulator::start_spell(std::uint32_t slot, Status s, double t) {
  auto& r = state_.records[slot];
  if (law(s).is_zero()) {
    // Degenerate phase: it ends the instant it starts.
    ++state_.counters.by_type[static_cast<std::size_t>(s == Status::Search ? EventType::SearchEnd
                                                                           : EventType::ManipulateEnd)];
    s = complement(s);
  }
  r.status = s;
  r.entry_time = t;
  r.threshold = standard_exponential(state_.rng);
  r.accrued = 0.0;
  r.accrued_at = t;
  r.flushed_at = t;
  schedule(slot);
}

void Simulator::flush(std::uint32_t slot, double t) {
  auto& r = state_.records[slot];
  if (occupation_ != nullptr && t > r.flushed_at) {
    occupation_->add_segment(r.status, r.flushed_at, t, r.age(r.flushed_at), scaling_.lambda(),
                             1.0 / scaling_.K2);
  }
  r.flushed_at = std::max(r.flushed_at, t);
}

void Simulator::flush_occupation(double t) {
  for (auto slot : state_.live) flush(slot, t);
}

std::uint32_t Simulator::add_predator(Status s, double t) {
  std::uint32_t slot;
  if (!state_.free_slots.empty()) {
    slot = state_.free_slots.back();
    state_.free_slots.pop_back();
  } else {
    slot = static_cast<std::uint32_t>(state_.records.size());
    state_.records.emplace_back();
  }
  auto& r = state_.records[slot];
  const auto stamp = r.stamp;
  r = PredatorRecord{};
  r.stamp = stamp;
  r.alive = true;
  r.live_pos = static_cast<std::uint32_t>(state_.live.size());
  state_.live.push_back(slot);
  start_spell(slot, s, t);
  return slot;
}

void Simulator::remove_predator(std::uint32_t slot) {
  auto& r = state_.records[slot];
  r.alive = false;
  ++r.stamp;
  const auto pos = r.live_pos;
  const auto moved = state_.live.back();
  state_.live[pos] = moved;
  state_.records[moved].live_pos = pos;
  state_.live.pop_back();
  state_.free_slots.push_back(slot);
}

void Simulator::on_density_change(double x_old) {
  const double t = state_.fast_time;
  const double x_law_old = model_->x_range().clamp(x_old);
  if (options_.mode == ClockMode::Requeue) {
    for (auto slot : state_.live) {
      auto& r = state_.records[slot];
      r.threshold = standard_exponential(state_.rng);
      r.accrued = 0.0;
      r.accrued_at = t;
      schedule(slot);
    }
    return;
  }
  for (auto slot : state_.live) {
    auto& r = state_.records[slot];
    if (!density_dependent_[index(r.status)]) continue;
    if (t > r.accrued_at) {
      r.accrued += law(r.status).cumulative_at(r.age(r.accrued_at), r.age(t), x_law_old);
      r.accrued_at = t;
    }
    schedule(slot);
  }
}

void Simulator::check_age(const PredatorRecord& r, double t) {
  if (!(r.age(t) < law(r.status).a_max())) ++diag_.age_support_violations;
}

void Simulator::maybe_rebuild_queue() {
  if (queue_.size() <= 4 * state_.live.size() + 64) return;
  std::vector<Entry> entries;
  entries.reserve(state_.live.size());
  for (auto slot : state_.live) {
    const auto& r = state_.records[slot];
    if (std::isfinite(r.scheduled)) entries.push_back({std::max(r.scheduled, state_.fast_time), slot, r.stamp});
  }
  queue_ = decltype(queue_)(std::greater<>{}, std::move(entries));
}

double Simulator::poisson_rate() const {
  const double n = static_cast<double>(state_.live.size());
  const double x = static_cast<double>(state_.prey_count);
  const auto& rates = model_->rates();
  return (n * (birth_bound_ + death_bound_) + x * (rates.prey_gamma + rates.prey_beta)) /
         scaling_.lambda();
}

Event Simulator::next_event() {
  maybe_rebuild_queue();
  while (!queue_.empty()) {
    const auto& top = queue_.top();
    const auto& r = state_.records[top.slot];
    if (r.alive && r.stamp == top.stamp) break;
    queue_.pop();
  }
  const double t_switch = queue_.empty() ? kInf : queue_.top().time;
  const double rate = poisson_rate();
  const double t_pois =
      rate > 0.0 ? state_.fast_time + standard_exponential(state_.rng) / rate : kInf;
  if (!std::isfinite(t_switch) && !std::isfinite(t_pois)) return {EventType::Extinct, kInf, 0};
  if (t_switch <= t_pois) {
    const auto slot = queue_.top().slot;
    const auto type = state_.records[slot].status == Status::Search ? EventType::SearchEnd
                                                                     : EventType::ManipulateEnd;
    return {type, t_switch, slot};
  }

  const auto& rates = model_->rates();
  const double x = static_cast<double>(state_.prey_count);
  double u = uniform01(state_.rng) * rate * scaling_.lambda();
  if (u < x * rates.prey_gamma) return {EventType::PreyBirth, t_pois, 0};
  u -= x * rates.prey_gamma;
  if (u < x * rates.prey_beta || state_.live.empty()) return {EventType::PreyDeath, t_pois, 0};
  u -= x * rates.prey_beta;
  const double per = birth_bound_ + death_bound_;
  auto k = static_cast<std::size_t>(u / per);
  if (k >= state_.live.size()) k = state_.live.size() - 1;
  const double v = u - static_cast<double>(k) * per;
  const auto slot = state_.live[k];
  const auto& r = state_.records[slot];
  const double a = r.age(t_pois);
  const auto& demo = rates.of(r.status);
  if (v < demo.birth_rate(a)) return {EventType::PredatorBirth, t_pois, slot};
  if (v >= birth_bound_ && v - birth_bound_ < demo.death_rate(a)) {
    return {EventType::PredatorDeath, t_pois, slot};
  }
  return {EventType::Thinned, t_pois, slot};
}

void Simulator::advance_to(double t) {
  if (t > state_.fast_time) {
    diag_.integrated_predators += static_cast<double>(state_.live.size()) *
                                  (t - state_.fast_time) / scaling_.lambda() / scaling_.K2;
    state_.fast_time = t;
  }
  for (auto slot : state_.live) check_age(state_.records[slot], state_.fast_time);
}

void Simulator::apply_event(const Event& e) {
  if (e.type == EventType::Extinct) {
    diag_.extinct = true;
    return;
  }
  const double t = e.time;
  diag_.integrated_predators += static_cast<double>(state_.live.size()) *
                                (t - state_.fast_time) / scaling_.lambda() / scaling_.K2;
  state_.fast_time = t;
  auto& counters = state_.counters;
  const auto bump = [&counters](EventType type) { ++counters.by_type[static_cast<std::size_t>(type)]; };

  switch (e.type) {
    case EventType::SearchEnd:
    case EventType::ManipulateEnd: {
      auto& r = state_.records[e.slot];
      check_age(r, t);
      const double x_now = law_density();
      const double spent =
          r.accrued + law(r.status).cumulative_at(r.age(r.accrued_at), r.age(t), x_now);
      if (std::isfinite(spent)) {
        diag_.max_clock_error = std::max(diag_.max_clock_error,
                                         std::abs(spent - r.threshold) / std::max(1.0, r.threshold));
      }
      if (r.status == Status::Search && state_.prey_count == 0) {
        // Nothing to catch: the spell goes on with a fresh clock.
        ++counters.suppressed_predations;
        r.threshold = standard_exponential(state_.rng);
        r.accrued = 0.0;
        r.accrued_at = t;
        schedule(e.slot);
        break;
      }
      bump(e.type);
      flush(e.slot, t);
      const Status from = r.status;
      const double x_old = density();
      if (from == Status::Search) --state_.prey_count;
      start_spell(e.slot, complement(from), t);
      if (from == Status::Search) on_density_change(x_old);
      break;
    }
    case EventType::PredatorBirth:
      bump(e.type);
      add_predator(Status::Manipulate, t);
      break;
    case EventType::PredatorDeath: {
      bump(e.type);
      check_age(state_.records[e.slot], t);
      flush(e.slot, t);
      remove_predator(e.slot);
      break;
    }
    case EventType::PreyBirth:
    case EventType::PreyDeath: {
      bump(e.type);
      const double x_old = density();
      state_.prey_count += e.type == EventType::PreyBirth ? 1 : -1;
      on_density_change(x_old);
      break;
    }
    case EventType::Thinned:
      bump(e.type);
      break;
    case EventType::Extinct:
      break;
  }

  const auto population = static_cast<std::uint64_t>(state_.prey_count) + state_.live.size();
  if (population > options_.max_population) {
    diag_.aborted = true;
    std::ostringstream os;
    os << "population " << population << " exceeded the cap " << options_.max_population
       << " at fast time " << t;
    diag_.message = os.str();
  }
}

// ---- simulate --------------------------------------------------------------

SimulationResult simulate(SimState state, const ResponseModel& model, const ScalingConfig& scaling,
                          double T, const RecordingOptions& recording,
                          const SimulationOptions& options) {
  if (!(T > 0.0)) throw ConfigError("simulation horizon T must be positive");
  const double lambda = scaling.lambda();
  const double x_start = static_cast<double>(state.prey_count) / scaling.K1;
  std::vector<double> times =
      recording.sample_times.empty() ? uniform_grid(T, 100) : recording.sample_times;
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw ConfigError("sample times must be strictly increasing");
  }
  std::vector<double> edges = recording.age_edges;
  if (edges.empty()) edges = uniform_age_edges(default_age_cap(model, x_start), 20);

  SimulationResult out;
  out.occupation = OccupationMeasure(T, recording.t_bins, edges);
  Simulator sim(model, scaling, std::move(state), options);
  sim.attach_occupation(&out.occupation);

  auto& traj = out.trajectory;
  std::size_t k = 0;
  const auto record_until = [&](double tau, bool inclusive) {
    while (k < times.size() && times[k] <= T &&
           (inclusive ? lambda * times[k] <= tau : lambda * times[k] < tau)) {
      const auto& st = sim.state();
      const double ys = static_cast<double>(st.count(Status::Search)) / scaling.K2;
      const double yt = static_cast<double>(st.predator_count()) / scaling.K2;
      traj.t.push_back(times[k]);
      traj.xi.push_back(static_cast<double>(st.prey_count) / scaling.K1);
      traj.y_total.push_back(yt);
      traj.y_search.push_back(ys);
      traj.y_manipulate.push_back(yt - ys);
      if (recording.age_snapshots) {
        std::array<std::vector<double>, 2> hist;
        for (auto& h : hist) h.assign(edges.size(), 0.0);
        for (auto slot : st.live) {
          const auto& r = st.records[slot];
          const double a = r.age(lambda * times[k]);
          auto bin = static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), a) - edges.begin());
          bin = bin == 0 ? 0 : bin - 1;
          hist[index(r.status)][bin] += 1.0 / scaling.K2;
        }
        traj.age_snapshots.push_back(std::move(hist));
      }
      ++k;
    }
  };

  const double horizon = lambda * T;
  while (true) {
    const Event e = sim.next_event();
    if (!(e.time <= horizon)) break;
    record_until(e.time, false);
    sim.apply_event(e);
    if (sim.diagnostics().aborted) break;
  }
  if (!sim.diagnostics().aborted) {
    sim.advance_to(horizon);
    record_until(horizon, true);
  }
  sim.flush_occupation(sim.state().fast_time);

  out.counters = sim.state().counters;
  out.diagnostics = sim.diagnostics();
  out.diagnostics.extinct = sim.state().live.empty() && sim.state().prey_count == 0;
  out.final_prey = sim.state().prey_count;
  return out;
}

ReplicaSummary run_replicas(const ResponseModel& model, const SimulationConfig& config,
                            std::size_t n, std::uint64_t seed_root, unsigned threads) {
  if (n == 0) throw ConfigError("replica count must be at least 1");
  ReplicaSummary summary;
  summary.replicas.resize(n);
  std::vector<std::string> errors(n);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        SimState st = init(config.scaling, config.initial, derive_seed(seed_root, i));
        summary.replicas[i] =
            simulate(std::move(st), model, config.scaling, config.T, config.recording, config.options);
      } catch (const std::exception& ex) {
        summary.replicas[i].diagnostics.aborted = true;
        summary.replicas[i].diagnostics.message = ex.what();
      }
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // Ordered reduction over complete replicas.
  std::size_t ok = 0;
  for (const auto& r : summary.replicas) {
    if (r.diagnostics.aborted) {
      ++summary.aborted;
      continue;
    }
    if (summary.t.empty()) {
      summary.t = r.trajectory.t;
      const auto m = summary.t.size();
      summary.mean_xi.assign(m, 0.0);
      summary.var_xi.assign(m, 0.0);
      summary.mean_y.assign(m, 0.0);
      summary.var_y.assign(m, 0.0);
    }
    ++ok;
    for (std::size_t j = 0; j < summary.t.size(); ++j) {
      summary.mean_xi[j] += r.trajectory.xi[j];
      summary.var_xi[j] += r.trajectory.xi[j] * r.trajectory.xi[j];
      summary.mean_y[j] += r.trajectory.y_total[j];
      summary.var_y[j] += r.trajectory.y_total[j] * r.trajectory.y_total[j];
    }
    summary.mean_occupation.accumulate(r.occupation);
  }
  if (ok > 0) {
    const double inv = 1.0 / static_cast<double>(ok);
    const double bessel = ok > 1 ? static_cast<double>(ok) / static_cast<double>(ok - 1) : 0.0;
    for (std::size_t j = 0; j < summary.t.size(); ++j) {
      summary.mean_xi[j] *= inv;
      summary.mean_y[j] *= inv;
      summary.var_xi[j] = bessel * (summary.var_xi[j] * inv - summary.mean_xi[j] * summary.mean_xi[j]);
      summary.var_y[j] = bessel * (summary.var_y[j] * inv - summary.mean_y[j] * summary.mean_y[j]);
    }
    OccupationMeasure scaled;
    scaled.accumulate(summary.mean_occupation, inv);
    summary.mean_occupation = std::move(scaled);
  }
  return summary;
}

}  // namespace predprey
