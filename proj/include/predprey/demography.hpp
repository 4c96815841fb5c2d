#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "predprey/hazards.hpp"

namespace predprey {

/// Function of the interaction age used for predator birth, death or net
/// growth rates.
class RateCurve {
 public:
  enum class Kind { Constant, ExpDecayToFloor, PiecewiseLinear };

  RateCurve() = default;

  static RateCurve constant(double v);
  /// v(a) = -A + B exp(-C a), C >= 0.
  static RateCurve exp_decay(double A, double B, double C);
  /// Linear interpolation through (age, value) points; first age 0, held
  /// constant after the last point.
  static RateCurve piecewise_linear(std::vector<std::pair<double, double>> points);

  Kind kind() const { return kind_; }
  const std::vector<double>& coefficients() const { return coef_; }
  const std::vector<std::pair<double, double>>& points() const { return points_; }

  /// Signed value v(a).
  double value(double a) const;
  /// max(0, v(a)): the curve used as an event rate.
  double rate_at(double a) const { return std::max(0.0, value(a)); }
  /// Signed integral of v over [0, a], never clipped.
  double integral(double a) const;
  /// Certified bound sup_a max(0, v(a)).
  double rate_bound() const;
  double value_min() const;
  double value_max() const;

  RateCurve negated() const;

  friend bool operator==(const RateCurve&, const RateCurve&) = default;

 private:
  Kind kind_ = Kind::Constant;
  std::vector<double> coef_{0.0};
  std::vector<std::pair<double, double>> points_;
};

/// Birth and death rates of predators in one status. When the status was
/// declared through a net growth curve v, the simulator uses the split
/// gamma = max(v, 0), beta = max(-v, 0) while responses use v itself.
class StatusDemography {
 public:
  StatusDemography() = default;
  StatusDemography(RateCurve birth, RateCurve death);
  static StatusDemography from_net(RateCurve net);

  double birth_rate(double a) const { return birth_.rate_at(a); }
  double death_rate(double a) const { return death_.rate_at(a); }
  double net(double a) const;
  double integrated_net(double a) const;

  double birth_bound() const { return birth_.rate_bound(); }
  double death_bound() const { return death_.rate_bound(); }
  double net_min() const;
  double net_max() const;

  const RateCurve& birth() const { return birth_; }
  const RateCurve& death() const { return death_; }
  const std::optional<RateCurve>& net_curve() const { return net_; }

  /// True when net() is the difference of the clipped simulator rates.
  bool split_consistent() const;

  friend bool operator==(const StatusDemography&, const StatusDemography&) = default;

 private:
  RateCurve birth_;
  RateCurve death_;
  std::optional<RateCurve> net_;
};

struct DemographyRates {
  std::array<StatusDemography, 2> predator;  ///< indexed by Status
  double prey_gamma = 0.0;
  double prey_beta = 0.0;

  const StatusDemography& of(Status s) const { return predator[index(s)]; }
  double prey_net() const { return prey_gamma - prey_beta; }
  /// Sup over statuses and ages of the birth (resp. death) rate.
  double birth_bound() const;
  double death_bound() const;

  void validate() const;

  friend bool operator==(const DemographyRates&, const DemographyRates&) = default;
};

/// Curve value; ExpDecayToFloor is clipped at 0 as birth/death rates are.
double rate_at(const RateCurve& curve, double a);

/// lambda_r(a) = gamma_r(a) - beta_r(a), possibly negative.
double net_growth(const DemographyRates& rates, Status status, double a);

/// Integral of net_growth over [0, a].
double integrated_net_growth(const DemographyRates& rates, Status status, double a);

}  // namespace predprey
