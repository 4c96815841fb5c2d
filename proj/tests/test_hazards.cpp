#include <gtest/gtest.h>

#include <boost/math/distributions/lognormal.hpp>
#include <cmath>
#include <random>

#include "predprey/errors.hpp"
#include "predprey/hazards.hpp"
#include "stats.hpp"

using namespace predprey;

namespace {

double pareto_survival(double k, double z, double a) { return a < z ? 1.0 : std::pow(z / a, k); }

law::Table ramp_table() {
  // hazard(a, x) = a * x on ages [0, 2] for x in {1, 3}, constant past 2.
  law::Table t;
  t.ages = {0.0, 1.0, 2.0};
  t.x_grid = {1.0, 3.0};
  t.hazard = {{0.0, 1.0, 2.0}, {0.0, 3.0, 6.0}};
  return t;
}

std::vector<InteractionLaw> sample_laws() {
  return {
      InteractionLaw::exponential_rate(DensityMap::affine(0.5, 2.0)),
      InteractionLaw::exponential_mean(DensityMap::reciprocal(1.0)),
      InteractionLaw::uniform(DensityMap::constant(1.5)),
      InteractionLaw::pareto(DensityMap::affine(1.5, 1.0), DensityMap::reciprocal(0.2)),
      InteractionLaw::lognormal(DensityMap::constant(-0.3), DensityMap::constant(0.8)),
      InteractionLaw::table(ramp_table()),
  };
}

}  // namespace

TEST(Hazards, ExponentialClosedForms) {
  const auto law = InteractionLaw::exponential_rate(DensityMap::affine(0.0, 2.0));
  for (double x : {0.5, 1.0, 4.0}) {
    const double r = 2.0 * x;
    EXPECT_DOUBLE_EQ(hazard(law, 0.3, x), r);
    EXPECT_NEAR(survival(law, x, 1.7), std::exp(-r * 1.7), 1e-15);
    EXPECT_NEAR(cumulative_hazard(law, 0.2, 0.9, x), r * 0.7, 1e-13);
    EXPECT_NEAR(mean_time(law, x), 1.0 / r, 1e-15);
  }
  const auto by_mean = InteractionLaw::exponential_mean(DensityMap::reciprocal(3.0));
  EXPECT_NEAR(mean_time(by_mean, 2.0), 1.5, 1e-15);
}

TEST(Hazards, UniformClosedForms) {
  const auto law = InteractionLaw::uniform(DensityMap::constant(2.0));
  EXPECT_DOUBLE_EQ(law.a_max(), 2.0);
  EXPECT_NEAR(survival(law, 1.0, 0.5), 0.75, 1e-15);
  EXPECT_NEAR(hazard(law, 0.5, 1.0), 1.0 / 1.5, 1e-15);
  EXPECT_NEAR(mean_time(law, 7.0), 1.0, 1e-15);
  EXPECT_EQ(cumulative_hazard(law, 0.0, 2.0, 1.0), kInf);
  EXPECT_THROW(hazard(law, 2.0, 1.0), DomainError);
}

TEST(Hazards, ParetoClosedForms) {
  const auto law = InteractionLaw::pareto(DensityMap::constant(2.5), DensityMap::constant(0.4));
  EXPECT_EQ(hazard(law, 0.2, 1.0), 0.0);
  EXPECT_NEAR(hazard(law, 0.8, 1.0), 2.5 / 0.8, 1e-14);
  for (double a : {0.1, 0.4, 0.9, 5.0}) EXPECT_NEAR(survival(law, 1.0, a), pareto_survival(2.5, 0.4, a), 1e-14);
  EXPECT_NEAR(mean_time(law, 1.0), 2.5 * 0.4 / 1.5, 1e-14);
}

TEST(Hazards, ParetoWithDivergentMeanIsRejected) {
  try {
    InteractionLaw::pareto(DensityMap::constant(0.9), DensityMap::constant(1.0));
    FAIL() << "k = 0.9 accepted";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("diverges"), std::string::npos) << e.what();
  }
  // k(x) = 0.5 + x dips below 1 near the bottom of the default range.
  EXPECT_THROW(InteractionLaw::pareto(DensityMap::affine(0.5, 1.0), DensityMap::constant(1.0)), ConfigError);
}

TEST(Hazards, InvalidParametersAreRejected) {
  EXPECT_THROW(InteractionLaw::exponential_rate(DensityMap::constant(0.0)), ConfigError);
  EXPECT_THROW(InteractionLaw::exponential_rate(DensityMap::affine(-1.0, 1.0)), ConfigError);
  EXPECT_THROW(InteractionLaw::uniform(DensityMap::reciprocal(1.0)), ConfigError);
  EXPECT_THROW(InteractionLaw::lognormal(DensityMap::constant(0.0), DensityMap::constant(-1.0)), ConfigError);
  auto bad = ramp_table();
  bad.ages = {0.0, 2.0, 1.0};
  EXPECT_THROW(InteractionLaw::table(bad), ConfigError);
  bad = ramp_table();
  bad.hazard[1][2] = -1.0;
  EXPECT_THROW(InteractionLaw::table(bad), ConfigError);
  bad = ramp_table();
  bad.hazard.pop_back();
  EXPECT_THROW(InteractionLaw::table(bad), ConfigError);
}

TEST(Hazards, DensityOutsideRangeIsADomainError) {
  const auto law = InteractionLaw::exponential_rate(DensityMap::constant(1.0), {0.5, 2.0});
  EXPECT_THROW(hazard(law, 0.1, 3.0), DomainError);
  EXPECT_THROW(survival(law, 0.1, 1.0), DomainError);
  EXPECT_NO_THROW(hazard(law, 0.1, 2.0));
}

TEST(Hazards, ZeroLaw) {
  const auto law = InteractionLaw::zero();
  EXPECT_EQ(law.a_max(), 0.0);
  EXPECT_EQ(mean_time(law, 1.0), 0.0);
  Rng rng(1);
  EXPECT_EQ(sample_interaction_time(law, 1.0, rng), 0.0);
}

TEST(Hazards, LogNormalMeanAgainstTrapezoidOracle) {
  const double mu = 0.2, sigma = 0.7;
  const auto law = InteractionLaw::lognormal(DensityMap::constant(mu), DensityMap::constant(sigma));
  const boost::math::lognormal_distribution<> ref(mu, sigma);
  const double trap = teststats::trapezoid([&](double a) { return cdf(complement(ref, a)); }, 0.0, 200.0, 1'000'000);
  EXPECT_NEAR(mean_time(law, 1.0), trap, 1e-8 * trap);
  EXPECT_NEAR(mean_time(law, 1.0), std::exp(mu + 0.5 * sigma * sigma), 1e-12);
  for (double a : {0.05, 0.5, 1.0, 3.0, 20.0}) {
    EXPECT_NEAR(survival(law, 1.0, a), cdf(complement(ref, a)), 1e-13);
  }
  // Deep tail stays accurate in log space.
  EXPECT_NEAR(law.log_survival_at(1.0, 1e4), std::log(cdf(complement(ref, 1e4))), 1e-8);
}

TEST(Hazards, TableCumulativeIsExactPiecewise) {
  const auto law = InteractionLaw::table(ramp_table());
  // At x = 2 the hazard is 2a on [0, 2] and 4 afterwards.
  EXPECT_NEAR(hazard(law, 0.5, 2.0), 1.0, 1e-14);
  EXPECT_NEAR(cumulative_hazard(law, 0.0, 1.5, 2.0), 1.5 * 1.5, 1e-13);
  EXPECT_NEAR(cumulative_hazard(law, 0.0, 3.0, 2.0), 4.0 + 4.0, 1e-13);
  // x is clamped to the grid ends.
  EXPECT_NEAR(hazard(law, 1.0, 10.0), 3.0, 1e-14);
  EXPECT_NEAR(mean_time(law, 1.0),
              teststats::trapezoid([](double a) { return a < 2.0 ? std::exp(-0.5 * a * a) : std::exp(-2.0 - 2.0 * (a - 2.0)); },
                                   0.0, 40.0, 400'000),
              1e-9);
}

TEST(Hazards, PropertySurvivalIsMonotoneAndMatchesHazard) {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> ux(0.2, 5.0);
  for (const auto& law : sample_laws()) {
    for (int trial = 0; trial < 20; ++trial) {
      const double x = ux(gen);
      const double amax = std::min(law.a_max(), 10.0);
      double prev = 1.0;
      for (int i = 0; i <= 50; ++i) {
        const double a = amax * i / 51.0;
        const double p = survival(law, x, a);
        ASSERT_GE(p, 0.0);
        ASSERT_LE(p, prev + 1e-15) << to_string(law.kind());
        prev = p;
        ASSERT_NEAR(std::log(p), law.log_survival_at(x, a), 1e-10 * (1.0 + std::abs(std::log(p))));
      }
      // Additivity of the cumulative hazard.
      const double a0 = 0.1 * amax, a1 = 0.4 * amax, a2 = 0.8 * amax;
      EXPECT_NEAR(cumulative_hazard(law, a0, a2, x),
                  cumulative_hazard(law, a0, a1, x) + cumulative_hazard(law, a1, a2, x), 1e-10);
    }
  }
}

TEST(Hazards, PropertyAgeAfterInvertsCumulativeHazard) {
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> ux(0.2, 5.0), ub(0.0, 6.0), ua(0.0, 0.5);
  for (const auto& law : sample_laws()) {
    for (int trial = 0; trial < 100; ++trial) {
      const double x = ux(gen), budget = ub(gen);
      const double a0 = ua(gen) * std::min(law.a_max(), 2.0);
      const double a1 = law.age_after(x, a0, budget);
      ASSERT_GE(a1, a0);
      if (std::isfinite(a1)) {
        ASSERT_NEAR(law.cumulative_at(a0, a1, x), budget, 1e-9 * (1.0 + budget)) << to_string(law.kind());
        ASSERT_LT(a1, law.a_max());
      }
    }
  }
}

TEST(Hazards, PropertyMeanEqualsIntegratedSurvival) {
  for (const auto& law : sample_laws()) {
    for (double x : {0.3, 1.0, 3.0}) {
      // Unbounded laws go through a = e^u so that heavy tails are covered.
      const double trap =
          std::isfinite(law.a_max())
              ? teststats::trapezoid([&](double a) { return law.survival_at(x, a); }, 0.0, law.a_max(), 400'000)
              : teststats::trapezoid([&](double u) { return law.survival_at(x, std::exp(u)) * std::exp(u); }, -30.0,
                                     std::log(1e14), 400'000);
      EXPECT_NEAR(mean_time(law, x), trap, 2e-6 * (1.0 + trap)) << to_string(law.kind()) << " x=" << x;
    }
  }
}

TEST(Hazards, SamplersPassKolmogorovSmirnov) {
  // One-sample KS at n = 1e5 and the 1% level; at most one failure in three
  // seeds per family.
  const std::size_t n = 100'000;
  const double crit = 1.628 / std::sqrt(static_cast<double>(n));
  const double x = 1.3;
  for (const auto& law : sample_laws()) {
    int failures = 0;
    for (std::uint64_t seed : {11ULL, 12ULL, 13ULL}) {
      Rng rng(seed);
      std::vector<double> xs(n);
      for (auto& v : xs) v = sample_interaction_time(law, x, rng);
      const double d = teststats::ks_one_sample(xs, [&](double a) { return 1.0 - law.survival_at(x, std::max(a, 0.0)); });
      if (d >= crit) ++failures;
    }
    EXPECT_LE(failures, 1) << to_string(law.kind());
  }
}

TEST(Hazards, SamplesStayInsideSupport) {
  const auto law = InteractionLaw::uniform(DensityMap::constant(0.7));
  Rng rng(5);
  for (int i = 0; i < 100000; ++i) {
    const double t = sample_interaction_time(law, 1.0, rng);
    ASSERT_GE(t, 0.0);
    ASSERT_LT(t, 0.7);
  }
}
