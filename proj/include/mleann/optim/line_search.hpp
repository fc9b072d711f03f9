#ifndef MLEANN_OPTIM_LINE_SEARCH_HPP
#define MLEANN_OPTIM_LINE_SEARCH_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "mleann/error.hpp"

namespace mleann::optim {

/// phi(alpha) along a search direction together with its slope phi'(alpha).
struct LinePoint {
  double step = 0.0;
  double value = 0.0;
  double slope = 0.0;
};

struct LineSearchOptions {
  double initial_step = 1.0;
  double sufficient_decrease = 1e-4;  // Armijo constant
  double curvature = 0.1;             // strong-Wolfe slope reduction
  double growth_limit = 10.0;         // max expansion ratio per trial while bracketing
  int max_evaluations = 20;
};

struct LineSearchResult {
  bool success = false;
  double step = 0.0;
  double value = 0.0;
  double slope = 0.0;
  int evaluations = 0;
  int accepted_evaluation = -1;  // 0-based index of the evaluation returned
};

namespace detail {

// Minimizer of the cubic Hermite interpolant through two points; exact on
// quadratics. Returns NaN when the interpolant has no interior minimum.
inline double cubic_minimizer(const LinePoint& a, const LinePoint& b) {
  const double h = b.step - a.step;
  if (h == 0.0) return std::numeric_limits<double>::quiet_NaN();
  const double d1 = a.slope + b.slope - 3.0 * (a.value - b.value) / (a.step - b.step);
  const double disc = d1 * d1 - a.slope * b.slope;
  if (!(disc >= 0.0)) return std::numeric_limits<double>::quiet_NaN();
  const double d2 = std::copysign(std::sqrt(disc), h);
  const double denom = b.slope - a.slope + 2.0 * d2;
  if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return b.step - h * (b.slope + d2 - d1) / denom;
}

}  // namespace detail

/// Bracketing line search with cubic (quadratic-exact) interpolation.
///
/// `phi(alpha)` must return a LinePoint. Accepts a step satisfying the
/// sufficient-decrease and strong curvature conditions. A step reached by
/// expansion or a clamped interpolation is refined by one more interpolation
/// before returning, so on a quadratic the exact minimizer is recovered. When
/// no acceptable step is found the best sufficient-decrease point is returned;
/// `success` is false only if no decrease was found at all.
template <class Phi>
LineSearchResult line_search(Phi&& phi, double value0, double slope0, const LineSearchOptions& opt = {}) {
  if (!(slope0 < 0.0)) throw contract_error("line search direction is not a descent direction");
  require(opt.initial_step > 0.0, "line search initial step must be positive");
  require(opt.growth_limit > 1.0, "line search growth limit must exceed 1");

  const LinePoint origin{0.0, value0, slope0};
  LineSearchResult res;
  LinePoint best = origin;
  int best_eval = -1;

  auto eval = [&](double step) {
    LinePoint p = phi(step);
    p.step = step;
    ++res.evaluations;
    if (std::isfinite(p.value) && std::isfinite(p.slope) && p.value < best.value &&
        p.value <= value0 + opt.sufficient_decrease * step * slope0) {
      best = p;
      best_eval = res.evaluations - 1;
    }
    return p;
  };
  auto armijo = [&](const LinePoint& p) {
    return std::isfinite(p.value) && p.value <= value0 + opt.sufficient_decrease * p.step * slope0;
  };
  auto curvature_ok = [&](const LinePoint& p) {
    return std::isfinite(p.slope) && std::abs(p.slope) <= opt.curvature * std::abs(slope0);
  };
  auto finish = [&](const LinePoint& p, int index) {
    res.success = true;
    res.step = p.step;
    res.value = p.value;
    res.slope = p.slope;
    res.accepted_evaluation = index;
    return res;
  };
  auto fallback = [&]() {
    if (best_eval >= 0) return finish(best, best_eval);
    res.success = false;
    return res;
  };
  // One interpolation between two points; keep whichever is lower.
  auto refine = [&](const LinePoint& a, const LinePoint& b, int b_index) {
    if (res.evaluations >= opt.max_evaluations || std::abs(b.slope) <= 1e-12 * std::abs(slope0))
      return finish(b, b_index);
    double s = detail::cubic_minimizer(a, b);
    const double lo = std::min(a.step, b.step), hi = std::max(a.step, b.step);
    const double upper = b.slope < 0.0 && b.step > a.step ? b.step * opt.growth_limit : hi;
    if (!std::isfinite(s) || s <= 0.0 || s < lo || s > upper || s == b.step) return finish(b, b_index);
    const LinePoint c = eval(s);
    if (armijo(c) && c.value <= b.value) return finish(c, res.evaluations - 1);
    return finish(b, b_index);
  };

  // Zoom inside a bracket; `lo` satisfies sufficient decrease with the lowest value.
  auto zoom = [&](LinePoint lo, LinePoint hi, int lo_index, int hi_index) {
    while (res.evaluations < opt.max_evaluations) {
      const double width = hi.step - lo.step;
      const double a = std::min(lo.step, hi.step), b = std::max(lo.step, hi.step);
      const double guard = 0.1 * std::abs(width);
      double s = std::isfinite(hi.value) && std::isfinite(hi.slope) ? detail::cubic_minimizer(lo, hi)
                                                                      : std::numeric_limits<double>::quiet_NaN();
      bool clamped = false;
      if (!std::isfinite(s)) {
        s = 0.5 * (lo.step + hi.step);
        clamped = true;
      } else if (s < a + guard || s > b - guard) {
        s = std::clamp(s, a + guard, b - guard);
        clamped = true;
      }
      const LinePoint c = eval(s);
      const int c_index = res.evaluations - 1;
      if (!armijo(c) || c.value >= lo.value) {
        hi = c;
        hi_index = c_index;
        continue;
      }
      if (curvature_ok(c)) return clamped ? refine(lo, c, c_index) : finish(c, c_index);
      if (c.slope * (hi.step - lo.step) >= 0.0) {
        hi = lo;
        hi_index = lo_index;
      }
      lo = c;
      lo_index = c_index;
    }
    (void)hi_index;
    return fallback();
  };

  LinePoint prev = origin;
  int prev_index = -1;
  double step = opt.initial_step;
  bool interpolated = false;
  while (res.evaluations < opt.max_evaluations) {
    const LinePoint cur = eval(step);
    const int cur_index = res.evaluations - 1;
    if (!armijo(cur) || (prev_index >= 0 && cur.value >= prev.value)) return zoom(prev, cur, prev_index, cur_index);
    if (curvature_ok(cur)) return interpolated ? finish(cur, cur_index) : refine(prev, cur, cur_index);
    if (cur.slope >= 0.0) return zoom(cur, prev, cur_index, prev_index);
    // Still descending: extrapolate, bounded by the growth limit.
    const double cap = cur.step * opt.growth_limit;
    double next = detail::cubic_minimizer(prev, cur);
    interpolated = std::isfinite(next) && next > cur.step && next <= cap;
    if (!interpolated) next = cap;
    prev = cur;
    prev_index = cur_index;
    step = next;
  }
  return fallback();
}

}  // namespace mleann::optim

#endif  // MLEANN_OPTIM_LINE_SEARCH_HPP
