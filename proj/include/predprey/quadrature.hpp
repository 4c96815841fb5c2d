#pragma once

#include <functional>

namespace predprey::quad {

inline constexpr double kRelTol = 1e-10;
inline constexpr double kAbsFloor = 1e-14;

/// Adaptive Gauss–Kronrod (15-point) integral of f over [a, b], relative
/// tolerance kRelTol with an absolute floor of kAbsFloor.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = kRelTol);

/// Same as integrate() but the interval is first cut at the given points
/// (kinks, support breaks); points outside (a, b) are ignored.
double integrate_pieces(const std::function<double(double)>& f, double a,
                        double b, std::initializer_list<double> cuts,
                        double rel_tol = kRelTol);

}  // namespace predprey::quad
