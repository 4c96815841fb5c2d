#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string_view>
#include <variant>
#include <vector>

#include "predprey/random.hpp"

namespace predprey {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Predator status: searching for a prey or manipulating (handling,
/// resting) one.
enum class Status : std::uint8_t { Search = 0, Manipulate = 1 };

inline constexpr Status complement(Status s) {
  return s == Status::Search ? Status::Manipulate : Status::Search;
}

inline constexpr std::size_t index(Status s) { return static_cast<std::size_t>(s); }

std::string_view to_string(Status s);

/// Closed interval of prey densities on which laws and responses are
/// evaluated. Nothing is extrapolated outside it.
struct DensityRange {
  double lo = 1e-6;
  double hi = 1e6;

  bool contains(double x) const { return x >= lo && x <= hi; }
  double clamp(double x) const { return x < lo ? lo : (x > hi ? hi : x); }
  friend bool operator==(const DensityRange&, const DensityRange&) = default;
};

/// Dependence of a distribution parameter on the prey density x.
/// Every kind is monotone in x, so extrema over a range sit at its ends.
class DensityMap {
 public:
  enum class Kind { Constant, Reciprocal, ReciprocalSquare, ReciprocalSqrt, Affine };

  DensityMap() = default;

  static DensityMap constant(double c) { return {Kind::Constant, c, 0.0}; }
  /// c / x
  static DensityMap reciprocal(double c) { return {Kind::Reciprocal, c, 0.0}; }
  /// c / x^2
  static DensityMap reciprocal_square(double c) { return {Kind::ReciprocalSquare, c, 0.0}; }
  /// c / sqrt(x)
  static DensityMap reciprocal_sqrt(double c) { return {Kind::ReciprocalSqrt, c, 0.0}; }
  /// a + b x
  static DensityMap affine(double a, double b) { return {Kind::Affine, a, b}; }

  double operator()(double x) const;

  Kind kind() const { return kind_; }
  /// c for the single-coefficient kinds, the intercept for Affine.
  double c0() const { return c0_; }
  /// Slope for Affine, zero otherwise.
  double c1() const { return c1_; }

  bool is_constant() const;
  double min_over(const DensityRange& r) const;
  double max_over(const DensityRange& r) const;

  friend bool operator==(const DensityMap&, const DensityMap&) = default;

 private:
  DensityMap(Kind k, double c0, double c1) : kind_(k), c0_(c0), c1_(c1) {}

  Kind kind_ = Kind::Constant;
  double c0_ = 0.0;
  double c1_ = 0.0;
};

std::string_view to_string(DensityMap::Kind k);

/// Parameter records for each law family. Their member functions are the
/// unchecked kernels; callers go through InteractionLaw.
namespace law {

/// Degenerate law T = 0 (no phase at all).
struct Zero {
  friend bool operator==(const Zero&, const Zero&) = default;
};

struct Exponential {
  DensityMap param;
  bool by_mean = false;  ///< param is E[T] rather than the rate

  double rate(double x) const;
  friend bool operator==(const Exponential&, const Exponential&) = default;
};

/// Uniform on [0, upper). The bound must not depend on x, otherwise a live
/// spell could end up past the support after a density change.
struct Uniform {
  DensityMap upper;
  friend bool operator==(const Uniform&, const Uniform&) = default;
};

/// Pareto(k, z): survival (z/a)^k on a >= z, hazard k/a there and 0 below z.
struct Pareto {
  DensityMap k;
  DensityMap z;
  friend bool operator==(const Pareto&, const Pareto&) = default;
};

struct LogNormal {
  DensityMap mu;
  DensityMap sigma;
  friend bool operator==(const LogNormal&, const LogNormal&) = default;
};

/// Tabulated hazard: hazard[i][j] is the rate at x_grid[i], ages[j].
/// Bilinear interpolation inside the grid; x is clamped to the grid ends
/// and the hazard is held at its last tabulated value past ages.back().
struct Table {
  std::vector<double> ages;
  std::vector<double> x_grid;
  std::vector<std::vector<double>> hazard;

  friend bool operator==(const Table&, const Table&) = default;
};

}  // namespace law

enum class LawKind { Zero, Exponential, Uniform, Pareto, LogNormal, Table };

std::string_view to_string(LawKind k);

/// Density-dependent distribution of an interaction time T_r(x).
///
/// The `*_at` members are unchecked kernels used by the simulator and the
/// quadrature code; x is expected inside range() and ages inside the
/// support. The free functions below perform the domain checks.
class InteractionLaw {
 public:
  using Params = std::variant<law::Zero, law::Exponential, law::Uniform,
                              law::Pareto, law::LogNormal, law::Table>;

  static InteractionLaw zero();
  static InteractionLaw exponential_rate(DensityMap rate, DensityRange range = {});
  static InteractionLaw exponential_mean(DensityMap mean, DensityRange range = {});
  static InteractionLaw uniform(DensityMap upper, DensityRange range = {});
  static InteractionLaw pareto(DensityMap k, DensityMap z, DensityRange range = {});
  static InteractionLaw lognormal(DensityMap mu, DensityMap sigma, DensityRange range = {});
  static InteractionLaw table(law::Table data, DensityRange range = {});

  LawKind kind() const { return static_cast<LawKind>(params_.index()); }
  const Params& params() const { return params_; }
  const DensityRange& range() const { return range_; }
  InteractionLaw with_range(DensityRange r) const;

  /// Support bound a_inf: +inf for unbounded laws, 0 for the zero law.
  double a_max() const;
  bool is_zero() const { return kind() == LawKind::Zero; }
  bool depends_on_density() const;

  double hazard_at(double a, double x) const;
  double cumulative_at(double a0, double a1, double x) const;
  double log_survival_at(double x, double a) const;
  double survival_at(double x, double a) const;
  /// Age a1 >= a0 with cumulative_at(a0, a1, x) == budget, or +inf when the
  /// remaining hazard mass is smaller than budget.
  double age_after(double x, double a0, double budget) const;
  double mean_at(double x) const;
  /// Mean residual mass: integral of the survival over [a, a_max).
  double residual_at(double x, double a) const;
  /// Age past which the survival is below kTailSurvival (a_max when bounded).
  double tail_cut(double x) const;
  double sample_at(double x, Rng& rng) const;
  /// Interior ages where the survival is not smooth or mass concentrates.
  std::vector<double> breakpoints(double x) const;

  friend bool operator==(const InteractionLaw&, const InteractionLaw&) = default;

  static constexpr double kTailSurvival = 1e-12;

 private:
  InteractionLaw(Params p, DensityRange r) : params_(std::move(p)), range_(r) {}
  void validate() const;

  Params params_;
  DensityRange range_;
};

/// Rate alpha(a, x) at which a spell of age a ends under prey density x.
double hazard(const InteractionLaw& law, double a, double x);

/// Integral of the hazard over [a0, a1]; +inf when a1 is the bound of a
/// bounded support.
double cumulative_hazard(const InteractionLaw& law, double a0, double a1, double x);

/// p(x, a) = exp(-cumulative_hazard(0, a)).
double survival(const InteractionLaw& law, double x, double a);

/// Exact draw of T(x).
double sample_interaction_time(const InteractionLaw& law, double x, Rng& rng);

/// E[T(x)]. Closed form where the family has one, quadrature otherwise.
double mean_time(const InteractionLaw& law, double x);

/// Integral of w(a) p(x, a) over the support by adaptive quadrature; the
/// tail past tail_cut() is added as w(cut) * residual_at(cut).
double integrate_against_survival(const InteractionLaw& law, double x,
                                  const std::function<double(double)>& w);

/// Integral of p(x, a) over [a0, a1] (a1 may be +inf).
double survival_integral(const InteractionLaw& law, double x, double a0, double a1);

}  // namespace predprey
