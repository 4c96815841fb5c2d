#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "predprey/ibm.hpp"
#include "predprey/ode.hpp"

namespace predprey {

/// Limit of the occupation measure, y(t) p_r(x(t), a) phi(x(t)) dt da,
/// integrated over the cells of an OccupationMeasure grid.
struct LimitOccupation {
  OccupationMeasure cells;
  /// max over time nodes of |sum_r integral p_r phi da - 1|
  double normalization_error = 0.0;
};

/// Time integrals use an 8-point Gauss–Legendre rule per t-bin on the ODE
/// dense output; age integrals are exact survival integrals per bin.
LimitOccupation limit_occupation(const ResponseModel& model, const OdeSolution& ode, double T,
                                 std::size_t t_bins, const std::vector<double>& age_edges);

struct TrajectoryError {
  double sup_x = 0.0;
  double sup_y = 0.0;
};

/// Sup-norm distance between (xi, y_total) and (x, y) on a shared grid.
TrajectoryError trajectory_error(const Trajectory& traj, const OdeSolution& ode);

struct DistanceReport {
  std::array<double, 2> tv{};      ///< per status, mean over compared t-slices
  std::array<double, 2> tv_max{};  ///< per status, worst t-slice
  double l1 = 0.0;                 ///< unnormalized, summed over both statuses
  bool empty = false;              ///< the empirical measure carries no mass

  nlohmann::json to_json() const;
};

/// Per-status total variation after normalizing each t-slice of both
/// measures to a probability over age bins (slices where either side has no
/// mass are skipped), plus the unnormalized L1 distance.
DistanceReport occupation_distance(const OccupationMeasure& measure, const OccupationMeasure& limit);

struct ConvergenceStudy {
  std::string preset;  ///< label only
  ResponseModel model;
  double x0 = 1.0;
  double y0 = 1.0;
  std::vector<ScalingConfig> ladder;
  double T = 5.0;
  std::size_t replicas = 20;
  std::size_t samples = 100;  ///< trajectory grid has samples + 1 points
  std::size_t t_bins = 10;
  std::size_t age_bins = 20;
  double age_cap = 0.0;       ///< 0 picks default_age_cap at x0
  std::uint64_t seed_root = 0;
  unsigned threads = 1;
  ClockMode mode = ClockMode::Accrued;
  bool timings = false;       ///< otherwise the seconds column is written as 0

  void validate() const;
};

struct ReplicaRow {
  double K1 = 0.0;
  double K2 = 0.0;
  std::size_t replica = 0;
  double sup_err_x = 0.0;
  double sup_err_y = 0.0;
  double tv_S = 0.0;
  double tv_M = 0.0;
  double seconds = 0.0;
  bool aborted = false;
  std::string message;
};

struct Quantiles {
  double min = 0.0, q25 = 0.0, median = 0.0, q75 = 0.0, max = 0.0;
  nlohmann::json to_json() const;
};

Quantiles quantiles(std::vector<double> v);

struct RungSummary {
  ScalingConfig scaling;
  Quantiles sup_err_x, sup_err_y, tv_S, tv_M;
  std::size_t aborted = 0;
  double seconds = 0.0;
};

struct StudyReport {
  std::vector<ReplicaRow> rows;  ///< ordered by (rung, replica)
  std::vector<RungSummary> rungs;
  double normalization_error = 0.0;
  bool ode_aborted = false;
  bool monotone_x = false, monotone_y = false, monotone_tv_S = false, monotone_tv_M = false;

  nlohmann::json to_json(const ConvergenceStudy& study) const;
  std::string to_csv() const;
};

/// Seed of replica i on rung r.
std::uint64_t study_seed(std::uint64_t root, std::size_t rung, std::size_t replica);

StudyReport run_study(const ConvergenceStudy& study);

}  // namespace predprey
