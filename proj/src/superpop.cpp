#include "superpop.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"
#include "quadrature.hpp"
#include "rng.hpp"

namespace infsel {

namespace {

void check_support(double a, double b) {
  require(std::isfinite(a) && std::isfinite(b), Errc::invalid_argument, "support bounds must be finite");
  require(a >= 0.0 && a < b, Errc::invalid_argument, "support bounds must satisfy 0 <= a < b");
}

}  // namespace

SuperpopModel SuperpopModel::uniform(double a, double b) {
  check_support(a, b);
  SuperpopModel m;
  m.kind_ = ModelKind::Uniform;
  m.lo_ = a;
  m.hi_ = b;
  m.validate();
  return m;
}

SuperpopModel SuperpopModel::truncated_exponential(double rate, double a, double b) {
  check_support(a, b);
  require(rate > 0.0 && std::isfinite(rate), Errc::invalid_argument, "rate must be positive");
  SuperpopModel m;
  m.kind_ = ModelKind::TruncatedExponential;
  m.lo_ = a;
  m.hi_ = b;
  m.rate_ = rate;
  m.validate();
  return m;
}

SuperpopModel SuperpopModel::piecewise_linear(std::vector<std::pair<double, double>> knots) {
  require(knots.size() >= 2, Errc::invalid_argument, "piecewise_linear: need >= 2 knots");
  SuperpopModel m;
  m.kind_ = ModelKind::PiecewiseLinear;
  for (auto& [y, f] : knots) {
    require(std::isfinite(y) && std::isfinite(f), Errc::invalid_argument, "knots must be finite");
    require(f >= 0.0, Errc::invalid_argument, "density must be non-negative at every knot");
    if (!m.knot_y_.empty())
      require(y > m.knot_y_.back(), Errc::invalid_argument, "knot abscissae must be strictly increasing");
    m.knot_y_.push_back(y);
    m.knot_f_.push_back(f);
  }
  check_support(m.knot_y_.front(), m.knot_y_.back());
  m.lo_ = m.knot_y_.front();
  m.hi_ = m.knot_y_.back();

  // Normalize to unit mass (trapezoid areas are exact for a linear density).
  double mass = 0.0;
  for (std::size_t i = 0; i + 1 < m.knot_y_.size(); ++i)
    mass += 0.5 * (m.knot_f_[i] + m.knot_f_[i + 1]) * (m.knot_y_[i + 1] - m.knot_y_[i]);
  require(mass > 0.0, Errc::invalid_argument, "piecewise_linear: total mass must be positive");
  for (double& f : m.knot_f_) f /= mass;

  m.knot_cum_.assign(m.knot_y_.size(), 0.0);
  for (std::size_t i = 0; i + 1 < m.knot_y_.size(); ++i)
    m.knot_cum_[i + 1] = m.knot_cum_[i] +
                         0.5 * (m.knot_f_[i] + m.knot_f_[i + 1]) * (m.knot_y_[i + 1] - m.knot_y_[i]);
  m.knot_cum_.back() = 1.0;
  m.validate();
  return m;
}

void SuperpopModel::validate() const {
  const double total = integrate_piecewise([this](double y) { return density(y); },
                                           merge_breakpoints(lo_, hi_, breakpoints()), 1e-12);
  require(std::abs(total - 1.0) <= 1e-9, Errc::invalid_argument,
          "density does not integrate to 1 over its support");
}

double SuperpopModel::density(double y) const {
  if (y < lo_ || y > hi_) return 0.0;
  switch (kind_) {
    case ModelKind::Uniform:
      return 1.0 / (hi_ - lo_);
    case ModelKind::TruncatedExponential: {
      const double denom = std::exp(-rate_ * lo_) - std::exp(-rate_ * hi_);
      return rate_ * std::exp(-rate_ * y) / denom;
    }
    case ModelKind::PiecewiseLinear: {
      const auto it = std::upper_bound(knot_y_.begin(), knot_y_.end(), y);
      std::size_t i = static_cast<std::size_t>(it - knot_y_.begin());
      if (i == 0) return knot_f_.front();
      if (i >= knot_y_.size()) return knot_f_.back();
      const double t = (y - knot_y_[i - 1]) / (knot_y_[i] - knot_y_[i - 1]);
      return knot_f_[i - 1] + t * (knot_f_[i] - knot_f_[i - 1]);
    }
  }
  return 0.0;
}

double SuperpopModel::cdf(double alpha) const {
  if (alpha <= lo_) return 0.0;
  if (alpha >= hi_) return 1.0;
  switch (kind_) {
    case ModelKind::Uniform:
      return (alpha - lo_) / (hi_ - lo_);
    case ModelKind::TruncatedExponential: {
      const double denom = std::exp(-rate_ * lo_) - std::exp(-rate_ * hi_);
      return (std::exp(-rate_ * lo_) - std::exp(-rate_ * alpha)) / denom;
    }
    case ModelKind::PiecewiseLinear: {
      const auto it = std::upper_bound(knot_y_.begin(), knot_y_.end(), alpha);
      const std::size_t i = static_cast<std::size_t>(it - knot_y_.begin());
      // alpha lies in segment [knot_{i-1}, knot_i); cdf is quadratic there.
      const double y0 = knot_y_[i - 1];
      const double f0 = knot_f_[i - 1];
      const double slope = (knot_f_[i] - f0) / (knot_y_[i] - y0);
      const double t = alpha - y0;
      return std::min(1.0, knot_cum_[i - 1] + f0 * t + 0.5 * slope * t * t);
    }
  }
  return 0.0;
}

double SuperpopModel::quantile(double u) const {
  require(u >= 0.0 && u <= 1.0, Errc::invalid_argument, "quantile level must lie in [0,1]");
  if (u <= 0.0) return lo_;
  if (u >= 1.0 && kind_ != ModelKind::PiecewiseLinear) return hi_;
  switch (kind_) {
    case ModelKind::Uniform:
      return lo_ + u * (hi_ - lo_);
    case ModelKind::TruncatedExponential: {
      const double denom = std::exp(-rate_ * lo_) - std::exp(-rate_ * hi_);
      return -std::log(std::exp(-rate_ * lo_) - u * denom) / rate_;
    }
    case ModelKind::PiecewiseLinear: {
      const auto it = std::lower_bound(knot_cum_.begin(), knot_cum_.end(), u);
      std::size_t i = static_cast<std::size_t>(it - knot_cum_.begin());
      if (i == 0) return knot_y_.front();
      const double y0 = knot_y_[i - 1];
      const double f0 = knot_f_[i - 1];
      const double c0 = knot_cum_[i - 1];
      const double slope = (knot_f_[i] - f0) / (knot_y_[i] - y0);
      const double target = u - c0;
      if (target <= 0.0) return y0;
      double t;
      if (std::abs(slope) < 1e-300) {
        t = target / f0;
      } else {
        // Stable positive root of 0.5*slope*t^2 + f0*t = target.
        const double disc = std::sqrt(f0 * f0 + 2.0 * slope * target);
        t = (slope > 0.0) ? (disc - f0) / slope : 2.0 * target / (f0 + disc);
      }
      return std::min(knot_y_[i], y0 + t);
    }
  }
  return lo_;
}

double SuperpopModel::moment(int k) const {
  require(k >= 1 && k <= 6, Errc::unsupported, "moment order must lie in [1,6]");
  switch (kind_) {
    case ModelKind::Uniform: {
      // (b^{k+1} - a^{k+1}) / ((k+1)(b-a))
      const double num = std::pow(hi_, k + 1) - std::pow(lo_, k + 1);
      return num / ((k + 1) * (hi_ - lo_));
    }
    case ModelKind::TruncatedExponential: {
      // I_k = a^k e^{-ra} - b^k e^{-rb} + (k/r) I_{k-1}, I_0 = e^{-ra} - e^{-rb}.
      const double ea = std::exp(-rate_ * lo_);
      const double eb = std::exp(-rate_ * hi_);
      double ik = ea - eb;
      const double denom = ik;
      for (int j = 1; j <= k; ++j)
        ik = std::pow(lo_, j) * ea - std::pow(hi_, j) * eb + (j / rate_) * ik;
      return ik / denom;
    }
    case ModelKind::PiecewiseLinear:
      return integrate_piecewise([this, k](double y) { return std::pow(y, k) * density(y); },
                                 merge_breakpoints(lo_, hi_, breakpoints()), 1e-9);
  }
  return 0.0;
}

std::vector<double> SuperpopModel::breakpoints() const {
  if (kind_ != ModelKind::PiecewiseLinear) return {};
  return std::vector<double>(knot_y_.begin() + 1, knot_y_.end() - 1);
}

std::string SuperpopModel::tag() const {
  char buf[96];
  switch (kind_) {
    case ModelKind::Uniform:
      std::snprintf(buf, sizeof buf, "uniform(%g;%g)", lo_, hi_);
      break;
    case ModelKind::TruncatedExponential:
      std::snprintf(buf, sizeof buf, "trunc_exp(%g;%g;%g)", rate_, lo_, hi_);
      break;
    case ModelKind::PiecewiseLinear:
      std::snprintf(buf, sizeof buf, "piecewise_linear(%zu knots)", knot_y_.size());
      break;
  }
  return buf;
}

Population draw_population(const SuperpopModel& model, std::int64_t n, std::uint64_t seed) {
  require(n >= 1, Errc::invalid_argument, "population size must be >= 1");
  SplitMix64 rng(seed);
  Population pop;
  pop.responses.resize(static_cast<std::size_t>(n));
  for (auto& y : pop.responses) y = model.quantile(rng.next_double());
  return pop;
}

}  // namespace infsel
