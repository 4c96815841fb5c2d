#include "predprey/demography.hpp"

#include <algorithm>
#include <cmath>

#include "predprey/errors.hpp"

namespace predprey {

RateCurve RateCurve::constant(double v) {
  if (!std::isfinite(v)) throw ConfigError("constant rate must be finite");
  RateCurve c;
  c.kind_ = Kind::Constant;
  c.coef_ = {v};
  return c;
}

RateCurve RateCurve::exp_decay(double A, double B, double C) {
  if (!std::isfinite(A) || !std::isfinite(B) || !std::isfinite(C) || C < 0.0) {
    throw ConfigError("exp_decay needs finite A, B and C >= 0");
  }
  RateCurve c;
  c.kind_ = Kind::ExpDecayToFloor;
  c.coef_ = {A, B, C};
  return c;
}

RateCurve RateCurve::piecewise_linear(std::vector<std::pair<double, double>> points) {
  if (points.empty()) throw ConfigError("piecewise_linear needs at least one point");
  if (points.front().first != 0.0) throw ConfigError("piecewise_linear must start at age 0");
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!(points[i].first > points[i - 1].first)) {
      throw ConfigError("piecewise_linear ages must be strictly increasing");
    }
  }
  for (const auto& [a, v] : points) {
    if (!std::isfinite(a) || !std::isfinite(v)) throw ConfigError("piecewise_linear points must be finite");
  }
  RateCurve c;
  c.kind_ = Kind::PiecewiseLinear;
  c.coef_.clear();
  c.points_ = std::move(points);
  return c;
}

double RateCurve::value(double a) const {
  switch (kind_) {
    case Kind::Constant:
      return coef_[0];
    case Kind::ExpDecayToFloor:
      return -coef_[0] + coef_[1] * std::exp(-coef_[2] * a);
    case Kind::PiecewiseLinear: {
      if (a >= points_.back().first) return points_.back().second;
      const auto it = std::upper_bound(points_.begin(), points_.end(), a,
                                       [](double v, const auto& p) { return v < p.first; });
      const auto& [a1, v1] = *it;
      const auto& [a0, v0] = *(it - 1);
      return v0 + (v1 - v0) * (a - a0) / (a1 - a0);
    }
  }
  return 0.0;
}

double RateCurve::integral(double a) const {
  switch (kind_) {
    case Kind::Constant:
      return coef_[0] * a;
    case Kind::ExpDecayToFloor: {
      const double A = coef_[0], B = coef_[1], C = coef_[2];
      if (C == 0.0) return (B - A) * a;
      return -A * a - (B / C) * std::expm1(-C * a);
    }
    case Kind::PiecewiseLinear: {
      double sum = 0.0;
      for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
        const double a0 = points_[i].first;
        if (a <= a0) return sum;
        const double a1 = std::min(a, points_[i + 1].first);
        sum += 0.5 * (points_[i].second + value(a1)) * (a1 - a0);
        if (a <= points_[i + 1].first) return sum;
      }
      return sum + points_.back().second * (a - points_.back().first);
    }
  }
  return 0.0;
}

double RateCurve::value_max() const {
  switch (kind_) {
    case Kind::Constant:
      return coef_[0];
    case Kind::ExpDecayToFloor:
      // monotone between v(0) = B - A and v(inf) = -A (v(0) when C = 0)
      return coef_[2] == 0.0 ? coef_[1] - coef_[0] : std::max(coef_[1] - coef_[0], -coef_[0]);
    case Kind::PiecewiseLinear: {
      double m = points_.front().second;
      for (const auto& p : points_) m = std::max(m, p.second);
      return m;
    }
  }
  return 0.0;
}

double RateCurve::value_min() const {
  switch (kind_) {
    case Kind::Constant:
      return coef_[0];
    case Kind::ExpDecayToFloor:
      return coef_[2] == 0.0 ? coef_[1] - coef_[0] : std::min(coef_[1] - coef_[0], -coef_[0]);
    case Kind::PiecewiseLinear: {
      double m = points_.front().second;
      for (const auto& p : points_) m = std::min(m, p.second);
      return m;
    }
  }
  return 0.0;
}

double RateCurve::rate_bound() const { return std::max(0.0, value_max()); }

RateCurve RateCurve::negated() const {
  switch (kind_) {
    case Kind::Constant:
      return constant(-coef_[0]);
    case Kind::ExpDecayToFloor:
      return exp_decay(-coef_[0], -coef_[1], coef_[2]);
    case Kind::PiecewiseLinear: {
      auto pts = points_;
      for (auto& p : pts) p.second = -p.second;
      return piecewise_linear(std::move(pts));
    }
  }
  return *this;
}

StatusDemography::StatusDemography(RateCurve birth, RateCurve death)
    : birth_(std::move(birth)), death_(std::move(death)) {}

StatusDemography StatusDemography::from_net(RateCurve net) {
  StatusDemography d(net, net.negated());
  d.net_ = std::move(net);
  return d;
}

double StatusDemography::net(double a) const {
  return net_ ? net_->value(a) : birth_.value(a) - death_.value(a);
}

double StatusDemography::integrated_net(double a) const {
  return net_ ? net_->integral(a) : birth_.integral(a) - death_.integral(a);
}

double StatusDemography::net_min() const {
  return net_ ? net_->value_min() : birth_.value_min() - death_.value_max();
}

double StatusDemography::net_max() const {
  return net_ ? net_->value_max() : birth_.value_max() - death_.value_min();
}

bool StatusDemography::split_consistent() const {
  if (net_) return true;
  return birth_.value_min() >= 0.0 && death_.value_min() >= 0.0;
}

double DemographyRates::birth_bound() const {
  return std::max(predator[0].birth_bound(), predator[1].birth_bound());
}

double DemographyRates::death_bound() const {
  return std::max(predator[0].death_bound(), predator[1].death_bound());
}

void DemographyRates::validate() const {
  if (!(prey_gamma >= 0.0) || !(prey_beta >= 0.0) || !std::isfinite(prey_gamma) ||
      !std::isfinite(prey_beta)) {
    throw ConfigError("prey birth and death rates must be finite and nonnegative");
  }
  for (const auto& d : predator) {
    if (!std::isfinite(d.birth_bound()) || !std::isfinite(d.death_bound())) {
      throw ConfigError("predator birth and death rates must be bounded");
    }
  }
}

double rate_at(const RateCurve& curve, double a) {
  if (curve.kind() == RateCurve::Kind::ExpDecayToFloor) return curve.rate_at(a);
  return curve.value(a);
}

double net_growth(const DemographyRates& rates, Status status, double a) {
  return rates.of(status).net(a);
}

double integrated_net_growth(const DemographyRates& rates, Status status, double a) {
  return rates.of(status).integrated_net(a);
}

}  // namespace predprey
