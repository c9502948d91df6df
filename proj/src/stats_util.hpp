#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace infsel {

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double central_moment(const std::vector<double>& v, double mean, int k) {
  double s = 0.0;
  for (double x : v) s += std::pow(x - mean, k);
  return s / static_cast<double>(v.size());
}

inline double se_of_mean(const std::vector<double>& v, double mean) {
  const auto r = static_cast<std::int64_t>(v.size());
  if (r < 2) return 0.0;
  const double var = central_moment(v, mean, 2) * static_cast<double>(r) / static_cast<double>(r - 1);
  return std::sqrt(std::max(var, 0.0) / static_cast<double>(r));
}

// Asymptotic SE of the plug-in variance: sqrt((mu4 - var^2)/reps).
inline double se_of_variance(const std::vector<double>& v, double mean, double var) {
  const double mu4 = central_moment(v, mean, 4);
  return std::sqrt(std::max(mu4 - var * var, 0.0) / static_cast<double>(v.size()));
}

inline double correlation(const std::vector<double>& x, const std::vector<double>& y) {
  const double mx = mean_of(x);
  const double my = mean_of(y);
  double cxy = 0.0, cxx = 0.0, cyy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    cxy += (x[i] - mx) * (y[i] - my);
    cxx += (x[i] - mx) * (x[i] - mx);
    cyy += (y[i] - my) * (y[i] - my);
  }
  if (cxx <= 0.0 || cyy <= 0.0) return 0.0;
  return cxy / std::sqrt(cxx * cyy);
}

}  // namespace infsel
