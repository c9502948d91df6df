#include "ecdf.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace infsel {

namespace {

template <class Target>
double sup_distance_impl(const StepCdf& step, Target&& target, double target_at_inf) {
  if (step.empty) return target_at_inf;
  double sup = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < step.jumps.size(); ++i) {
    const double t = target(step.jumps[i]);
    sup = std::max(sup, std::abs(step.values[i] - t));
    sup = std::max(sup, std::abs(prev - t));
    prev = step.values[i];
  }
  return std::max(sup, std::abs(prev - target_at_inf));
}

}  // namespace

double StepCdf::eval(double alpha) const {
  if (empty || jumps.empty()) return 0.0;
  const auto it = std::upper_bound(jumps.begin(), jumps.end(), alpha);
  if (it == jumps.begin()) return 0.0;
  return values[static_cast<std::size_t>(it - jumps.begin()) - 1];
}

StepCdf empirical_cdf(const Population& population, const IndicatorVector& indicator) {
  require(population.size() == indicator.size(), Errc::invalid_argument,
          "population and indicator lengths differ");
  StepCdf out;
  if (indicator.total == 0) {
    out.empty = true;
    return out;
  }
  std::vector<std::pair<double, std::int64_t>> selected;
  for (std::size_t k = 0; k < indicator.counts.size(); ++k)
    if (indicator.counts[k] > 0) selected.emplace_back(population.responses[k], indicator.counts[k]);
  std::sort(selected.begin(), selected.end());

  const double denom = static_cast<double>(indicator.total);
  std::int64_t cum = 0;
  for (std::size_t i = 0; i < selected.size(); ++i) {
    cum += selected[i].second;
    if (i + 1 < selected.size() && selected[i + 1].first == selected[i].first) continue;  // merge ties
    out.jumps.push_back(selected[i].first);
    out.values.push_back(static_cast<double>(cum) / denom);
  }
  return out;
}

double sup_distance(const StepCdf& step, const SuperpopModel& target) {
  return sup_distance_impl(step, [&](double a) { return target.cdf(a); }, 1.0);
}

double sup_distance(const StepCdf& step, const LimitCdf& target) {
  return sup_distance_impl(step, [&](double a) { return target.eval(a); }, 1.0);
}

double sup_distance_unnormalized(const StepCdf& step, const LimitCdf& target) {
  return sup_distance_impl(step, [&](double a) { return target.unnormalized(a); },
                           target.normalizer());
}

double quantile(const StepCdf& step, double p) {
  require(!step.empty, Errc::runtime, "quantile of an empty empirical c.d.f.");
  require(p > 0.0 && p < 1.0, Errc::invalid_argument, "quantile level must lie in (0,1)");
  const auto it = std::lower_bound(step.values.begin(), step.values.end(), p);
  return step.jumps[static_cast<std::size_t>(it - step.values.begin())];
}

double limit_quantile(const LimitCdf& limit, double p) { return limit.quantile(p); }

double quantile_sup_distance(const StepCdf& step, const LimitCdf& limit, double k_lo, double k_hi,
                             int grid) {
  require(!step.empty, Errc::runtime, "quantile distance of an empty empirical c.d.f.");
  require(grid >= 2, Errc::invalid_argument, "quantile grid must have >= 2 points");
  require(k_lo > 0.0 && k_lo <= k_hi && k_hi < 1.0, Errc::invalid_argument,
          "quantile interval must satisfy 0 < lo <= hi < 1");
  double sup = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double p = k_lo + (k_hi - k_lo) * static_cast<double>(i) / (grid - 1);
    sup = std::max(sup, std::abs(quantile(step, p) - limit.quantile(p)));
  }
  return sup;
}

}  // namespace infsel
