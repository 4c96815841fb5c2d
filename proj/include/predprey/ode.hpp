#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "predprey/responses.hpp"

namespace predprey {

/// Limit system x' = (gamma - beta) x - y phi(x), y' = y psi(x).
class LimitSystem {
 public:
  /// `linear_phi_slope` flags phi(x) = c x, which enables conservation().
  explicit LimitSystem(ResponseModel model, std::optional<double> linear_phi_slope = std::nullopt);

  const ResponseModel& model() const { return model_; }
  double prey_net() const { return prey_net_; }
  const std::optional<double>& linear_phi_slope() const { return slope_; }

 private:
  ResponseModel model_;
  double prey_net_;
  std::optional<double> slope_;
};

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

Vec2 rhs(const LimitSystem& sys, double x, double y);

/// Largest finite-difference slope |rhs(p) - rhs(q)| / |p - q| over an
/// n x n grid of [x_lo, x_hi] x [0, y_max].
double lipschitz_probe(const LimitSystem& sys, double x_lo, double x_hi, double y_max,
                       std::size_t n = 20);

struct OdeOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double h_init = 0.0;        ///< 0 picks a starting step automatically
  std::size_t max_steps = 10'000'000;
  std::vector<double> grid;   ///< output times; empty means 201 uniform points
  bool conservation = false;  ///< add the L column (needs linear phi)
};

/// One accepted step with its quartic dense-output coefficients.
struct DenseStep {
  double t0 = 0.0;
  double h = 0.0;
  std::array<Vec2, 5> r{};

  Vec2 eval(double t) const;
};

struct OdeSolution {
  std::vector<double> t;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> conservation;  ///< empty unless requested
  std::vector<DenseStep> steps;
  std::vector<double> step_errors;   ///< scaled local error estimate per accepted step
  std::size_t rejected = 0;
  bool aborted = false;
  double t_end = 0.0;                ///< last time reached
  std::string message;

  /// Dense output at t in [0, t_end].
  Vec2 at(double t) const;
  double max_conservation_drift() const;
  std::string to_csv() const;
};

/// Dormand–Prince 5(4) with step rejection on loss of positivity or on
/// leaving the model range; aborts with a partial solution when the step
/// collapses.
OdeSolution integrate(const LimitSystem& sys, double x0, double y0, double T,
                      const OdeOptions& options = {});

/// L(x, y) = lambda log y - c y - integral_1^{log x} psi(e^u) du with
/// lambda = gamma - beta. Only defined for phi(x) = c x.
double conservation(const LimitSystem& sys, double x, double y);

struct Eigenvalues {
  std::array<double, 2> re{};
  std::array<double, 2> im{};
};

Eigenvalues eigenvalues(const Mat2& m);

enum class JacobianMode { Analytic, FiniteDifference };

/// Jacobian of rhs. Analytic mode uses registered phi', psi' and falls back
/// to central differences with h = 1e-6 (1 + |x|).
Mat2 jacobian(const LimitSystem& sys, double x, double y, JacobianMode mode);

struct Equilibrium {
  double x = 0.0;
  double y = 0.0;
  Mat2 jacobian{};
  Eigenvalues eig;
  double rhs_norm = 0.0;

  nlohmann::json to_json() const;
};

/// Root of psi in [x_lo, x_hi] and y* = (gamma - beta) x* / phi(x*).
/// Empty when psi does not change sign on the bracket.
std::optional<Equilibrium> find_equilibrium(const LimitSystem& sys, double x_lo, double x_hi);

/// Return time of the orbit: first crossing of the section through the start
/// point (same direction as at t = 0) that lands within `tol` of the start,
/// after the orbit has left that ball.
std::optional<double> detect_period(const OdeSolution& sol, double tol = 1e-3);

}  // namespace predprey
