#include <gtest/gtest.h>

#include <cmath>

#include "predprey/errors.hpp"
#include "predprey/ibm.hpp"
#include "predprey/presets.hpp"
#include "stats.hpp"

using namespace predprey;

namespace {

RecordingOptions recording(const ResponseModel& model, double T, double x0, std::size_t samples = 50) {
  RecordingOptions r;
  r.sample_times = uniform_grid(T, samples);
  r.t_bins = 5;
  r.age_edges = uniform_age_edges(default_age_cap(model, x0), 10);
  return r;
}

ResponseModel pareto_uniform_model(double gamma, double beta) {
  DemographyRates r;
  r.predator[index(Status::Search)] = StatusDemography::from_net(RateCurve::exp_decay(0.5, 1.5, 1.0));
  r.predator[index(Status::Manipulate)] = StatusDemography::from_net(RateCurve::constant(0.8));
  r.prey_gamma = gamma;
  r.prey_beta = beta;
  return ResponseModel(InteractionLaw::pareto(DensityMap::affine(1.5, 1.0), DensityMap::reciprocal(0.2)),
                       InteractionLaw::uniform(DensityMap::constant(0.5)), r);
}

ResponseModel prey_only(double gamma, double beta) {
  DemographyRates r;
  r.prey_gamma = gamma;
  r.prey_beta = beta;
  return ResponseModel(InteractionLaw::exponential_rate(DensityMap::constant(1.0)), InteractionLaw::zero(), r);
}

}  // namespace

TEST(Ibm, InitialState) {
  const ScalingConfig sc{1000.0, 20.0};
  const SimState s = init(sc, {1.234, 0.75, Status::Manipulate, std::nullopt}, 3);
  EXPECT_EQ(s.prey_count, 1234);
  EXPECT_EQ(s.predator_count(), 15u);
  EXPECT_EQ(s.count(Status::Manipulate), 15u);
  for (auto slot : s.live) {
    EXPECT_GT(s.records[slot].threshold, 0.0);
    EXPECT_EQ(s.records[slot].entry_time, 0.0);
  }
  // Exact decimal products are not rounded down.
  EXPECT_EQ(init({100.0, 10.0}, {0.29, 0.3, Status::Search, std::nullopt}, 1).prey_count, 29);
}

TEST(Ibm, ScalingValidation) {
  EXPECT_THROW((ScalingConfig{0.0, 1.0}.validate()), ConfigError);
  EXPECT_THROW((ScalingConfig{1.0, -1.0}.validate()), ConfigError);
  EXPECT_DOUBLE_EQ((ScalingConfig{1000.0, 10.0}.lambda()), 100.0);
}

TEST(Ibm, OccupationSegmentArithmetic) {
  OccupationMeasure occ(2.0, 2, {0.0, 1.0, 2.0});
  // lambda = 10: fast window [5, 25) is macroscopic [0.5, 2.5), clipped at T = 2.
  occ.add_segment(Status::Search, 5.0, 25.0, 0.0, 10.0, 0.5);
  // Ages 0..1 on fast [5, 6), 1..2 on [6, 7), overflow afterwards.
  EXPECT_NEAR(occ.mass(Status::Search, 0, 0), 0.05, 1e-15);
  EXPECT_NEAR(occ.mass(Status::Search, 0, 1), 0.05, 1e-15);
  EXPECT_NEAR(occ.mass(Status::Search, 0, 2), 0.15, 1e-12);
  EXPECT_NEAR(occ.mass(Status::Search, 1, 2), 0.5, 1e-12);
  EXPECT_NEAR(occ.total_mass(), 1.5 * 0.5, 1e-12);
  EXPECT_EQ(occ.mass(Status::Manipulate, 0, 0), 0.0);
}

TEST(Ibm, DeterministicUnderFixedSeed) {
  const auto p = make_preset("holling2", {});
  const ScalingConfig sc{200.0, 20.0};
  const auto rec = recording(p.model, 1.0, 1.5);
  const auto a = simulate(init(sc, {1.5, 1.5, Status::Manipulate, std::nullopt}, 7), p.model, sc, 1.0, rec);
  const auto b = simulate(init(sc, {1.5, 1.5, Status::Manipulate, std::nullopt}, 7), p.model, sc, 1.0, rec);
  const auto c = simulate(init(sc, {1.5, 1.5, Status::Manipulate, std::nullopt}, 8), p.model, sc, 1.0, rec);
  EXPECT_EQ(a.trajectory.to_csv(), b.trajectory.to_csv());
  EXPECT_EQ(a.occupation.to_json(), b.occupation.to_json());
  EXPECT_EQ(a.counters, b.counters);
  EXPECT_NE(a.trajectory.to_csv(), c.trajectory.to_csv());
}

TEST(Ibm, PropertyOccupationMassAndClockConservation) {
  // Total occupation mass equals int_0^T Y^K(s) ds; every switch happens
  // when the accrued hazard reaches its threshold; ages stay in support.
  const std::vector<std::pair<std::string, ResponseModel>> models = {
      {"holling2", make_preset("holling2", {}).model},
      {"nearest_prey", make_preset("nearest_prey", {}).model},
      {"age_penalty", make_preset("age_penalty", {}).model},
      {"pareto_uniform", pareto_uniform_model(1.0, 0.5)},
  };
  for (const auto& [name, model] : models) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const ScalingConfig sc{150.0, 15.0};
      const auto r = simulate(init(sc, {1.2, 1.0, Status::Manipulate, std::nullopt}, seed), model, sc, 2.0,
                              recording(model, 2.0, 1.2));
      ASSERT_FALSE(r.diagnostics.aborted) << r.diagnostics.message;
      EXPECT_NEAR(r.occupation.total_mass(), r.diagnostics.integrated_predators,
                  1e-9 * (1.0 + r.diagnostics.integrated_predators))
          << name;
      EXPECT_LE(r.diagnostics.max_clock_error, 1e-10) << name;
      EXPECT_EQ(r.diagnostics.age_support_violations, 0u) << name;
      for (std::size_t i = 0; i < r.trajectory.t.size(); ++i) {
        EXPECT_NEAR(r.trajectory.y_search[i] + r.trajectory.y_manipulate[i], r.trajectory.y_total[i], 1e-12);
        EXPECT_GE(r.trajectory.xi[i], 0.0);
      }
    }
  }
}

TEST(Ibm, PropertyRequeueModeConservesClocksToo) {
  const auto model = pareto_uniform_model(1.0, 0.5);
  const ScalingConfig sc{50.0, 20.0};
  SimulationOptions opt;
  opt.mode = ClockMode::Requeue;
  const auto r = simulate(init(sc, {1.0, 1.0, Status::Manipulate, std::nullopt}, 3), model, sc, 1.0,
                          recording(model, 1.0, 1.0), opt);
  EXPECT_NEAR(r.occupation.total_mass(), r.diagnostics.integrated_predators, 1e-9);
  EXPECT_LE(r.diagnostics.max_clock_error, 1e-10);
}

TEST(Ibm, CriticalPreyIsAMartingale) {
  // Without predators the prey count is a birth-death process:
  // E Xi(T) = x0 exp((gamma - beta) T).
  for (const auto& [g, b] : {std::pair{1.0, 1.0}, std::pair{2.0, 1.0}}) {
    const auto model = prey_only(g, b);
    SimulationConfig cfg;
    cfg.scaling = {100.0, 10.0};
    cfg.initial = {1.0, 0.0, Status::Manipulate, std::nullopt};
    cfg.T = 1.0;
    cfg.recording = recording(model, 1.0, 1.0, 4);
    const auto sum = run_replicas(model, cfg, 2000, 11);
    std::vector<double> finals;
    for (const auto& r : sum.replicas) finals.push_back(r.trajectory.xi.back());
    const auto [mean, se] = teststats::mean_se(finals);
    EXPECT_NEAR(mean, std::exp(g - b), 4.0 * se) << "gamma=" << g;
  }
}

TEST(Ibm, SearchCompletionsFollowTheFunctionalResponse) {
  // One predator among plentiful prey: completed searches per fast time
  // unit approach phi(x).
  const auto p = make_preset("holling2", {});
  const ScalingConfig sc{1e6, 1.0};
  const double T = 2e-3;  // fast horizon 2000, about 1000 cycles
  double completions = 0.0;
  std::vector<double> per;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RecordingOptions rec = recording(p.model, T, 1.0, 2);
    const auto r = simulate(init(sc, {1.0, 1.0, Status::Search, std::nullopt}, seed), p.model, sc, T, rec);
    // Demography is slowed by lambda = 1e6 so the predator survives.
    const double c = static_cast<double>(r.counters[EventType::SearchEnd]);
    completions += c;
    per.push_back(c / (sc.lambda() * T));
  }
  const auto [mean, se] = teststats::mean_se(per);
  EXPECT_NEAR(mean, phi(p.model, 1.0), 4.0 * se + 1e-3);
  EXPECT_GT(completions, 10000.0);
}

TEST(Ibm, AccruedAndRequeueModesAgreeInLaw) {
  const auto model = pareto_uniform_model(1.0, 0.5);
  SimulationConfig cfg;
  cfg.scaling = {50.0, 20.0};
  cfg.initial = {1.0, 1.0, Status::Manipulate, std::nullopt};
  cfg.T = 0.5;
  cfg.recording = recording(model, 0.5, 1.0, 2);
  std::array<std::vector<double>, 2> finals;
  for (int m = 0; m < 2; ++m) {
    cfg.options.mode = m == 0 ? ClockMode::Accrued : ClockMode::Requeue;
    const auto sum = run_replicas(model, cfg, 400, 1000 + m);
    for (const auto& r : sum.replicas) finals[m].push_back(static_cast<double>(r.final_prey));
  }
  const double d = teststats::ks_two_sample(finals[0], finals[1]);
  EXPECT_LT(d, teststats::ks_two_sample_critical(400, 400));
}

TEST(Ibm, ZeroManipulationLawReturnsToSearchAtOnce) {
  const auto p = make_preset("holling1", {});
  const ScalingConfig sc{1000.0, 10.0};
  const auto r = simulate(init(sc, {1.0, 0.5, Status::Manipulate, std::nullopt}, 2), p.model, sc, 0.5,
                          recording(p.model, 0.5, 1.0));
  // Newborns start in M and leave it immediately; initial predators are
  // placed in S directly.
  EXPECT_EQ(r.counters[EventType::ManipulateEnd],
            r.counters[EventType::SearchEnd] + r.counters[EventType::PredatorBirth]);
  for (double m : r.trajectory.y_manipulate) EXPECT_EQ(m, 0.0);
  double m_mass = 0.0;
  for (std::size_t t = 0; t < r.occupation.t_bins(); ++t) {
    for (std::size_t a = 0; a < r.occupation.age_bins(); ++a) m_mass += r.occupation.mass(Status::Manipulate, t, a);
  }
  EXPECT_EQ(m_mass, 0.0);
}

TEST(Ibm, PredationIsSuppressedWithoutPrey) {
  // Few prey and many hungry predators: prey run out and searches that end
  // with no prey left are redrawn.
  DemographyRates rates;
  rates.prey_gamma = 0.0;
  const ResponseModel model(InteractionLaw::exponential_rate(DensityMap::constant(5.0)),
                            InteractionLaw::exponential_mean(DensityMap::constant(0.1)), rates);
  const ScalingConfig sc{20.0, 20.0};
  const auto r = simulate(init(sc, {0.5, 1.0, Status::Search, std::nullopt}, 4), model, sc, 5.0,
                          recording(model, 5.0, 0.5));
  EXPECT_EQ(r.final_prey, 0);
  EXPECT_GT(r.counters.suppressed_predations, 0u);
  EXPECT_EQ(r.counters[EventType::SearchEnd], 10u);
}

TEST(Ibm, PopulationCapAborts) {
  const auto model = prey_only(5.0, 0.0);
  const ScalingConfig sc{100.0, 10.0};
  SimulationOptions opt;
  opt.max_population = 300;
  const auto r = simulate(init(sc, {1.0, 0.0, Status::Search, std::nullopt}, 1), model, sc, 5.0,
                          recording(model, 5.0, 1.0), opt);
  EXPECT_TRUE(r.diagnostics.aborted);
  EXPECT_FALSE(r.diagnostics.message.empty());
}

TEST(Ibm, InitialAgesFromABoundedLaw) {
  const auto model = pareto_uniform_model(1.0, 0.5);
  const ScalingConfig sc{100.0, 50.0};
  InitialCondition ic{1.0, 1.0, Status::Manipulate, InteractionLaw::uniform(DensityMap::constant(0.4))};
  const SimState s = init(sc, ic, 9);
  for (auto slot : s.live) {
    EXPECT_LE(s.records[slot].entry_time, 0.0);
    EXPECT_GT(s.records[slot].entry_time, -0.4);
  }
  const auto r = simulate(s, model, sc, 0.5, recording(model, 0.5, 1.0));
  EXPECT_EQ(r.diagnostics.age_support_violations, 0u);
  // Ages past the manipulation bound are impossible to start from.
  ic.age_law = InteractionLaw::uniform(DensityMap::constant(0.9));
  EXPECT_THROW(Simulator(model, sc, init(sc, ic, 9)), ConfigError);
}

TEST(Ibm, ReplicaSummaryIndependentOfThreadCount) {
  const auto p = make_preset("holling2", {});
  SimulationConfig cfg;
  cfg.scaling = {100.0, 10.0};
  cfg.initial = {1.5, 1.5, Status::Manipulate, std::nullopt};
  cfg.T = 1.0;
  cfg.recording = recording(p.model, 1.0, 1.5, 10);
  const auto a = run_replicas(p.model, cfg, 12, 5, 1);
  const auto b = run_replicas(p.model, cfg, 12, 5, 3);
  EXPECT_EQ(a.mean_xi, b.mean_xi);
  EXPECT_EQ(a.var_y, b.var_y);
  EXPECT_EQ(a.mean_occupation.to_json(), b.mean_occupation.to_json());
  for (std::size_t i = 0; i < 12; ++i) {
    EXPECT_EQ(a.replicas[i].trajectory.to_csv(), b.replicas[i].trajectory.to_csv());
  }
}
