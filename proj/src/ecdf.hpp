#pragma once

#include <cstdint>
#include <vector>

#include "designs.hpp"
#include "superpop.hpp"
#include "weights.hpp"

namespace infsel {

// Right-continuous step function: values[i] applies on [jumps[i], jumps[i+1]).
// An all-zero indicator yields the empty flag and the identically-zero
// function (the Definition-1 denominator convention).
struct StepCdf {
  std::vector<double> jumps;   // strictly increasing
  std::vector<double> values;  // non-decreasing, in [0,1], last == 1 unless empty
  bool empty = false;

  double eval(double alpha) const;
};

// F(alpha) = sum of counts with y_k <= alpha over (1_{I=0} + sum of counts);
// with-replacement counts weight multiply, equal responses merge into one jump.
StepCdf empirical_cdf(const Population& population, const IndicatorVector& indicator);

// Exact sup over the real line of |step - target| for a continuous
// non-decreasing target: the sup is attained at a jump (from the left or the
// right) or in a tail, so checking jumps plus the target's limits is exact.
double sup_distance(const StepCdf& step, const SuperpopModel& target);
double sup_distance(const StepCdf& step, const LimitCdf& target);
// Against the unnormalized G_s (target tends to normalizer, not 1, at +inf).
double sup_distance_unnormalized(const StepCdf& step, const LimitCdf& target);

// inf{y : step(y) >= p}: the smallest jump whose value reaches p.
double quantile(const StepCdf& step, double p);

// inf{y : F_s(y) >= p} by bisection (delegates to LimitCdf::quantile).
double limit_quantile(const LimitCdf& limit, double p);

// max over a uniform grid of [k_lo, k_hi] of |quantile(step,p) - xi_s(p)|;
// a grid lower bound of the true sup over the interval.
double quantile_sup_distance(const StepCdf& step, const LimitCdf& limit, double k_lo, double k_hi,
                             int grid);

}  // namespace infsel
