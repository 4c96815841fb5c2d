#include "predprey/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include <boost/math/quadrature/gauss.hpp>

#include "predprey/errors.hpp"
#include "predprey/io.hpp"

namespace predprey {

namespace {

constexpr Status kStatuses[] = {Status::Search, Status::Manipulate};

// Nodes and weights of the 8-point Gauss–Legendre rule on [-1, 1].
std::vector<std::pair<double, double>> legendre8() {
  using rule = boost::math::quadrature::gauss<double, 8>;
  std::vector<std::pair<double, double>> nw;
  const auto& xs = rule::abscissa();
  const auto& ws = rule::weights();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    nw.emplace_back(-xs[i], ws[i]);
    if (xs[i] != 0.0) nw.emplace_back(xs[i], ws[i]);
  }
  return nw;
}

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

nlohmann::json num(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(io::format_double(v));
}

}  // namespace

LimitOccupation limit_occupation(const ResponseModel& model, const OdeSolution& ode, double T,
                                 std::size_t t_bins, const std::vector<double>& age_edges) {
  LimitOccupation out{OccupationMeasure(T, t_bins, age_edges), 0.0};
  if (ode.t_end < T) throw ContractError("ODE solution does not cover [0, T]");
  const auto rule = legendre8();
  const auto edges = out.cells.t_edges();
  const std::size_t nb = out.cells.age_bins();
  for (std::size_t j = 0; j < t_bins; ++j) {
    const double a = edges[j], b = edges[j + 1];
    for (const auto& [node, w] : rule) {
      const double t = 0.5 * (a + b) + 0.5 * (b - a) * node;
      const Vec2 v = ode.at(t);
      const double x = model.x_range().clamp(v[0]);
      const double f = phi(model, x);
      double norm = 0.0;
      for (Status s : kStatuses) {
        const auto& law = model.law(s);
        if (law.is_zero()) continue;
        for (std::size_t k = 0; k < nb; ++k) {
          const double lo = age_edges[k];
          const double hi = k + 1 < nb ? age_edges[k + 1] : kInf;
          const double cell = survival_integral(law, x, std::min(lo, law.a_max()), std::min(hi, law.a_max()));
          norm += cell;
          out.cells.mass(s, j, k) += 0.5 * (b - a) * w * v[1] * f * cell;
        }
      }
      out.normalization_error = std::max(out.normalization_error, std::abs(norm * f - 1.0));
    }
  }
  return out;
}

TrajectoryError trajectory_error(const Trajectory& traj, const OdeSolution& ode) {
  if (traj.t.size() != ode.t.size()) throw ContractError("trajectory and ODE grids differ in length");
  TrajectoryError e;
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    if (std::abs(traj.t[i] - ode.t[i]) > 1e-12 * std::max(1.0, std::abs(ode.t[i]))) {
      throw ContractError("trajectory and ODE grids differ");
    }
    e.sup_x = std::max(e.sup_x, std::abs(traj.xi[i] - ode.x[i]));
    e.sup_y = std::max(e.sup_y, std::abs(traj.y_total[i] - ode.y[i]));
  }
  return e;
}

nlohmann::json DistanceReport::to_json() const {
  return {{"tv_S", tv[0]}, {"tv_M", tv[1]}, {"tv_max_S", tv_max[0]}, {"tv_max_M", tv_max[1]},
          {"l1", l1}, {"empty", empty}};
}

DistanceReport occupation_distance(const OccupationMeasure& measure, const OccupationMeasure& limit) {
  if (measure.t_bins() != limit.t_bins() || measure.age_edges() != limit.age_edges() ||
      measure.T() != limit.T()) {
    throw ContractError("occupation measures are binned differently");
  }
  DistanceReport rep;
  rep.empty = !(measure.total_mass() > 0.0);
  const std::size_t nb = measure.age_bins();
  for (Status s : kStatuses) {
    double sum_tv = 0.0;
    std::size_t compared = 0;
    bool any_mass = false;
    for (std::size_t j = 0; j < measure.t_bins(); ++j) {
      double me = 0.0, ml = 0.0;
      for (std::size_t k = 0; k < nb; ++k) {
        me += measure.mass(s, j, k);
        ml += limit.mass(s, j, k);
        rep.l1 += std::abs(measure.mass(s, j, k) - limit.mass(s, j, k));
      }
      any_mass = any_mass || me > 0.0 || ml > 0.0;
      if (!(me > 0.0) || !(ml > 0.0)) continue;
      double d = 0.0;
      for (std::size_t k = 0; k < nb; ++k) d += std::abs(measure.mass(s, j, k) / me - limit.mass(s, j, k) / ml);
      d *= 0.5;
      sum_tv += d;
      rep.tv_max[index(s)] = std::max(rep.tv_max[index(s)], d);
      ++compared;
    }
    if (compared > 0) {
      rep.tv[index(s)] = sum_tv / static_cast<double>(compared);
    } else if (any_mass) {
      rep.tv[index(s)] = 1.0;
      rep.tv_max[index(s)] = 1.0;
    }
  }
  return rep;
}

void ConvergenceStudy::validate() const {
  if (ladder.empty()) throw ConfigError("study ladder must have at least one rung");
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    ladder[i].validate();
    if (i > 0 && !(ladder[i].lambda() > ladder[i - 1].lambda())) {
      throw ConfigError("study ladder must have strictly increasing K1/K2");
    }
  }
  if (!(T > 0.0)) throw ConfigError("study horizon T must be positive");
  if (replicas == 0) throw ConfigError("study needs at least one replica per rung");
  if (samples == 0 || t_bins == 0 || age_bins == 0) {
    throw ConfigError("study grids need at least one sample, t-bin and age bin");
  }
  if (!(x0 > 0.0) || !(y0 > 0.0)) throw ConfigError("study initial densities must be positive");
  if (!(age_cap >= 0.0)) throw ConfigError("age_cap must be nonnegative");
}

nlohmann::json Quantiles::to_json() const {
  return {{"min", num(min)}, {"q25", num(q25)}, {"median", num(median)}, {"q75", num(q75)}, {"max", num(max)}};
}

Quantiles quantiles(std::vector<double> v) {
  std::erase_if(v, [](double d) { return std::isnan(d); });
  if (v.empty()) return {nan(), nan(), nan(), nan(), nan()};
  std::sort(v.begin(), v.end());
  const auto q = [&v](double p) {
    const double pos = p * static_cast<double>(v.size() - 1);
    const auto i = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(i);
    return i + 1 < v.size() ? v[i] + frac * (v[i + 1] - v[i]) : v[i];
  };
  return {v.front(), q(0.25), q(0.5), q(0.75), v.back()};
}

std::uint64_t study_seed(std::uint64_t root, std::size_t rung, std::size_t replica) {
  return derive_seed(derive_seed(root, rung), replica);
}

nlohmann::json StudyReport::to_json(const ConvergenceStudy& study) const {
  nlohmann::json rs = nlohmann::json::array();
  for (const auto& r : rungs) {
    rs.push_back({{"K1", r.scaling.K1},
                  {"K2", r.scaling.K2},
                  {"lambda", r.scaling.lambda()},
                  {"sup_err_x", r.sup_err_x.to_json()},
                  {"sup_err_y", r.sup_err_y.to_json()},
                  {"tv_S", r.tv_S.to_json()},
                  {"tv_M", r.tv_M.to_json()},
                  {"aborted", r.aborted},
                  {"seconds", r.seconds}});
  }
  nlohmann::json aborts = nlohmann::json::array();
  for (const auto& row : rows) {
    if (row.aborted) aborts.push_back({{"K1", row.K1}, {"K2", row.K2}, {"replica", row.replica}, {"message", row.message}});
  }
  return {{"preset", study.preset},
          {"x0", study.x0},
          {"y0", study.y0},
          {"T", study.T},
          {"replicas", study.replicas},
          {"seed_root", study.seed_root},
          {"normalization_error", normalization_error},
          {"ode_aborted", ode_aborted},
          {"rungs", rs},
          {"aborted_replicas", aborts},
          {"monotone",
           {{"sup_err_x", monotone_x}, {"sup_err_y", monotone_y}, {"tv_S", monotone_tv_S}, {"tv_M", monotone_tv_M}}}};
}

std::string StudyReport::to_csv() const {
  std::string out = "K1,K2,replica,sup_err_x,sup_err_y,tv_S,tv_M,seconds\n";
  for (const auto& r : rows) {
    out += io::format_double(r.K1) + ',' + io::format_double(r.K2) + ',' + std::to_string(r.replica) + ',' +
           io::format_double(r.sup_err_x) + ',' + io::format_double(r.sup_err_y) + ',' +
           io::format_double(r.tv_S) + ',' + io::format_double(r.tv_M) + ',' + io::format_double(r.seconds) +
           '\n';
  }
  return out;
}

StudyReport run_study(const ConvergenceStudy& study) {
  study.validate();
  const auto grid = uniform_grid(study.T, study.samples);
  const LimitSystem sys(study.model);
  OdeOptions oopt;
  oopt.grid = grid;
  const OdeSolution ode = integrate(sys, study.x0, study.y0, study.T, oopt);

  StudyReport rep;
  rep.ode_aborted = ode.aborted;
  if (ode.aborted) throw DomainError("limit ODE aborted: " + ode.message);

  const double cap = study.age_cap > 0.0 ? study.age_cap : default_age_cap(study.model, study.x0);
  const auto edges = uniform_age_edges(cap, study.age_bins);
  const LimitOccupation limit = limit_occupation(study.model, ode, study.T, study.t_bins, edges);
  rep.normalization_error = limit.normalization_error;

  const std::size_t n_rungs = study.ladder.size();
  const std::size_t jobs = n_rungs * study.replicas;
  rep.rows.resize(jobs);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t job = next++; job < jobs; job = next++) {
      const std::size_t rung = job / study.replicas;
      const std::size_t rep_i = job % study.replicas;
      const auto& sc = study.ladder[rung];
      ReplicaRow& row = rep.rows[job];
      row.K1 = sc.K1;
      row.K2 = sc.K2;
      row.replica = rep_i;
      const auto start = std::chrono::steady_clock::now();
      try {
        SimState st = init(sc, {study.x0, study.y0, Status::Manipulate, std::nullopt},
                           study_seed(study.seed_root, rung, rep_i));
        RecordingOptions rec;
        rec.sample_times = grid;
        rec.t_bins = study.t_bins;
        rec.age_edges = edges;
        SimulationOptions so;
        so.mode = study.mode;
        const auto res = simulate(std::move(st), study.model, sc, study.T, rec, so);
        if (res.diagnostics.aborted) {
          row.aborted = true;
          row.message = res.diagnostics.message;
        } else {
          const auto te = trajectory_error(res.trajectory, ode);
          const auto d = occupation_distance(res.occupation, limit.cells);
          row.sup_err_x = te.sup_x;
          row.sup_err_y = te.sup_y;
          row.tv_S = d.tv[0];
          row.tv_M = d.tv[1];
        }
      } catch (const std::exception& e) {
        row.aborted = true;
        row.message = e.what();
      }
      if (row.aborted) row.sup_err_x = row.sup_err_y = row.tv_S = row.tv_M = nan();
      if (study.timings) {
        row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(study.threads, static_cast<unsigned>(jobs)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (std::size_t r = 0; r < n_rungs; ++r) {
    RungSummary s;
    s.scaling = study.ladder[r];
    std::vector<double> ex, ey, ts, tm;
    for (std::size_t i = 0; i < study.replicas; ++i) {
      const auto& row = rep.rows[r * study.replicas + i];
      s.aborted += row.aborted ? 1 : 0;
      s.seconds += row.seconds;
      ex.push_back(row.sup_err_x);
      ey.push_back(row.sup_err_y);
      ts.push_back(row.tv_S);
      tm.push_back(row.tv_M);
    }
    s.sup_err_x = quantiles(ex);
    s.sup_err_y = quantiles(ey);
    s.tv_S = quantiles(ts);
    s.tv_M = quantiles(tm);
    rep.rungs.push_back(s);
  }
  const auto decreasing = [&rep](auto field) {
    for (std::size_t r = 1; r < rep.rungs.size(); ++r) {
      if (!(field(rep.rungs[r]) < field(rep.rungs[r - 1]))) return false;
    }
    return true;
  };
  rep.monotone_x = decreasing([](const RungSummary& s) { return s.sup_err_x.median; });
  rep.monotone_y = decreasing([](const RungSummary& s) { return s.sup_err_y.median; });
  rep.monotone_tv_S = decreasing([](const RungSummary& s) { return s.tv_S.median; });
  rep.monotone_tv_M = decreasing([](const RungSummary& s) { return s.tv_M.median; });
  // A skipped phase has no occupation to converge.
  if (study.model.law(Status::Manipulate).is_zero()) rep.monotone_tv_M = true;
  return rep;
}

}  // namespace predprey
