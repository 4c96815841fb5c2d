#include "predprey/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace predprey::quad {

constexpr double kEps = std::numeric_limits<double>::epsilon();

namespace {

struct Panel {
  double a, b, value, err, l1;
  bool operator<(const Panel& o) const { return err < o.err; }
};

Panel panel(const std::function<double(double)>& f, double a, double b) {
  using boost::math::quadrature::gauss_kronrod;
  Panel p{a, b, 0.0, 0.0, 0.0};
  p.value = gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0, &p.err, &p.l1);
  return p;
}

constexpr int kMaxPanels = 4000;

}  // namespace

// Globally adaptive bisection on the panel with the largest error. Boost's
// recursive driver halves the absolute target per level, which never
// terminates once the error estimate reaches roundoff.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol) {
  if (!(b > a)) return 0.0;
  std::priority_queue<Panel> heap;
  heap.push(panel(f, a, b));
  double value = heap.top().value, err = heap.top().err, l1 = heap.top().l1;
  for (int n = 1; n < kMaxPanels; ++n) {
    const double target = std::max(rel_tol * std::abs(value), 64.0 * kEps * l1);
    if (err <= target) break;
    const Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      heap.push(worst);
      break;
    }
    const Panel left = panel(f, worst.a, mid), right = panel(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    err += left.err + right.err - worst.err;
    l1 += left.l1 + right.l1 - worst.l1;
    heap.push(left);
    heap.push(right);
  }
  return std::abs(value) < kAbsFloor ? 0.0 : value;
}

double integrate_pieces(const std::function<double(double)>& f, double a,
                        double b, std::initializer_list<double> cuts,
                        double rel_tol) {
  if (!(b > a)) return 0.0;
  std::vector<double> pts{a};
  for (double c : cuts) {
    if (c > a && c < b && std::isfinite(c)) pts.push_back(c);
  }
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) sum += integrate(f, pts[i], pts[i + 1], rel_tol);
  return sum;
}

}  // namespace predprey::quad
