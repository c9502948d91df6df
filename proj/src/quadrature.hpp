#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "error.hpp"

namespace infsel {

namespace detail {

inline double simpson_rule(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <class F>
double adaptive_simpson_rec(F&& f, double a, double fa, double b, double fb, double m, double fm,
                            double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson_rule(a, fa, m, fm, flm);
  const double right = simpson_rule(m, fm, b, fb, frm);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson with absolute tolerance. Integrand must be finite on [a,b].
template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol, int max_depth = 48) {
  if (a == b) return 0.0;
  require(a < b, Errc::invalid_argument, "adaptive_simpson: a < b required");
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double whole = detail::simpson_rule(a, fa, b, fb, fm);
  return detail::adaptive_simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

// Integrates across the given sorted breakpoints so kinks and jumps of the
// integrand land on panel boundaries.
template <class F>
double integrate_piecewise(F&& f, const std::vector<double>& points, double tol) {
  require(points.size() >= 2, Errc::invalid_argument, "integrate_piecewise: need >= 2 points");
  double total = 0.0;
  const double per_piece = tol / static_cast<double>(points.size() - 1);
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (points[i + 1] > points[i]) total += adaptive_simpson(f, points[i], points[i + 1], per_piece);
  }
  return total;
}

// Merges breakpoints into a strictly increasing list clamped to [lo, hi].
inline std::vector<double> merge_breakpoints(double lo, double hi, std::vector<double> extra) {
  extra.push_back(lo);
  extra.push_back(hi);
  std::sort(extra.begin(), extra.end());
  std::vector<double> out;
  for (double x : extra) {
    if (x < lo || x > hi) continue;
    if (out.empty() || x > out.back()) out.push_back(x);
  }
  return out;
}

}  // namespace infsel
