#include "weights.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "error.hpp"
#include "quadrature.hpp"
#include "rng.hpp"
#include "stats_util.hpp"

namespace infsel {

namespace {

constexpr int kGridChecks = 1001;

// Population with coordinate 0 (and optionally 1) pinned; the rest i.i.d.
Population conditioned_population(const SuperpopModel& model, std::int64_t n_pop,
                                  const std::vector<double>& pinned, std::uint64_t seed) {
  Population pop;
  pop.responses.resize(static_cast<std::size_t>(n_pop));
  SplitMix64 rng(seed);
  for (std::size_t k = 0; k < pinned.size(); ++k) pop.responses[k] = pinned[k];
  for (std::size_t k = pinned.size(); k < pop.responses.size(); ++k)
    pop.responses[k] = model.quantile(rng.next_double());
  return pop;
}

void check_in_support(const SuperpopModel& model, double y) {
  require(y >= model.support_lo() && y <= model.support_hi(), Errc::invalid_argument,
          "conditioning point must lie in the model support");
}

}  // namespace

Weight Weight::constant(double c) {
  require(c >= 0.0 && std::isfinite(c), Errc::invalid_argument, "constant weight must be >= 0");
  Weight w;
  w.form_ = Form::Constant;
  w.c_ = c;
  return w;
}

Weight Weight::linear(double slope) {
  require(slope > 0.0 && std::isfinite(slope), Errc::invalid_argument, "linear weight slope must be > 0");
  Weight w;
  w.form_ = Form::Linear;
  w.c_ = slope;
  return w;
}

Weight Weight::step(std::vector<double> edges, std::vector<double> levels) {
  require(!levels.empty() && edges.size() + 1 == levels.size(), Errc::invalid_argument,
          "step weight: need one more level than edges");
  for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    require(edges[i] < edges[i + 1], Errc::invalid_argument, "step edges must be strictly increasing");
  for (double l : levels)
    require(l >= 0.0 && std::isfinite(l), Errc::invalid_argument, "step levels must be >= 0");
  Weight w;
  w.form_ = Form::Step;
  w.edges_ = std::move(edges);
  w.levels_ = std::move(levels);
  return w;
}

Weight Weight::custom(std::function<double(double)> fn, std::vector<double> breakpoints) {
  require(static_cast<bool>(fn), Errc::invalid_argument, "custom weight: callable required");
  Weight w;
  w.form_ = Form::Custom;
  w.fn_ = std::move(fn);
  w.edges_ = std::move(breakpoints);
  return w;
}

double Weight::eval(double y) const {
  switch (form_) {
    case Form::Constant:
      return c_;
    case Form::Linear:
      return c_ * y;
    case Form::Step: {
      const auto it = std::lower_bound(edges_.begin(), edges_.end(), y);
      return levels_[static_cast<std::size_t>(it - edges_.begin())];
    }
    case Form::Custom:
      return fn_(y);
  }
  return 0.0;
}

std::vector<double> Weight::breakpoints() const {
  if (form_ == Form::Step || form_ == Form::Custom) return edges_;
  return {};
}

WeightSpec WeightSpec::make(Weight m, const SuperpopModel& model, double m_bound,
                            std::string description) {
  WeightSpec spec;
  spec.m = std::move(m);
  spec.m_bound = m_bound;
  spec.description = std::move(description);

  const double lo = model.support_lo();
  const double hi = model.support_hi();
  for (int i = 0; i < kGridChecks; ++i) {
    const double y = lo + (hi - lo) * static_cast<double>(i) / (kGridChecks - 1);
    const double v = spec.m.eval(y);
    require(v >= 0.0, Errc::invalid_argument, "weight must be non-negative on the support");
    require(v <= m_bound * (1.0 + 1e-12) + 1e-15, Errc::invalid_argument,
            "weight exceeds its dominating bound on the support");
  }

  if (spec.m.form() == Weight::Form::Constant) {
    spec.normalizer = spec.m.constant_value();
  } else {
    auto pts = merge_breakpoints(lo, hi, [&] {
      auto bk = spec.m.breakpoints();
      const auto mk = model.breakpoints();
      bk.insert(bk.end(), mk.begin(), mk.end());
      return bk;
    }());
    spec.normalizer =
        integrate_piecewise([&](double y) { return spec.m.eval(y) * model.density(y); }, pts, 1e-10);
  }
  require(spec.normalizer > 0.0, Errc::no_limit,
          "weight has zero normalizer: integral of m f must be positive");
  return spec;
}

LimitCdf::LimitCdf(WeightSpec weight, SuperpopModel model)
    : weight_(std::move(weight)), model_(std::move(model)) {
  const double lo = model_.support_lo();
  const double hi = model_.support_hi();

  const bool uniform = model_.kind() == ModelKind::Uniform;
  switch (weight_.m.form()) {
    case Weight::Form::Constant:
      path_ = Path::ConstantWeight;
      normalizer_ = weight_.m.constant_value();
      break;
    case Weight::Form::Linear:
      path_ = uniform ? Path::UniformLinear : Path::Numeric;
      break;
    case Weight::Form::Step:
      path_ = uniform ? Path::UniformStep : Path::Numeric;
      break;
    case Weight::Form::Custom:
      path_ = Path::Numeric;
      break;
  }

  if (path_ == Path::UniformLinear) {
    normalizer_ = weight_.m.slope() * 0.5 * (hi * hi - lo * lo) / (hi - lo);
  } else if (path_ == Path::UniformStep) {
    nodes_ = merge_breakpoints(lo, hi, weight_.m.breakpoints());
    cum_.assign(nodes_.size(), 0.0);
    for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
      const double mid = 0.5 * (nodes_[i] + nodes_[i + 1]);
      cum_[i + 1] = cum_[i] + weight_.m.eval(mid) * (nodes_[i + 1] - nodes_[i]) / (hi - lo);
    }
    normalizer_ = cum_.back();
  } else if (path_ == Path::Numeric) {
    // Breakpoint-aligned nodes, refined so each cell is short enough that a
    // local adaptive pass at eval time is cheap and accurate.
    auto coarse = merge_breakpoints(lo, hi, [&] {
      auto bk = weight_.m.breakpoints();
      const auto mk = model_.breakpoints();
      bk.insert(bk.end(), mk.begin(), mk.end());
      return bk;
    }());
    const double span = hi - lo;
    nodes_.clear();
    for (std::size_t i = 0; i + 1 < coarse.size(); ++i) {
      const double len = coarse[i + 1] - coarse[i];
      const int cells = std::max(1, static_cast<int>(std::ceil(len / span * 1024.0)));
      for (int c = 0; c < cells; ++c)
        nodes_.push_back(coarse[i] + len * static_cast<double>(c) / cells);
    }
    nodes_.push_back(hi);
    cum_.assign(nodes_.size(), 0.0);
    for (std::size_t i = 0; i + 1 < nodes_.size(); ++i)
      cum_[i + 1] = cum_[i] + adaptive_simpson([this](double y) { return integrand(y); }, nodes_[i],
                                               nodes_[i + 1], 1e-13);
    normalizer_ = cum_.back();
  }

  require(normalizer_ > 0.0, Errc::no_limit, "limit c.d.f.: zero normalizer");
  require(std::abs(normalizer_ - weight_.normalizer) <= 1e-8 * std::max(1.0, weight_.normalizer),
          Errc::runtime, "limit c.d.f. normalizer disagrees with the weight spec");
}

double LimitCdf::unnormalized(double alpha) const {
  const double lo = model_.support_lo();
  const double hi = model_.support_hi();
  if (alpha <= lo) return 0.0;
  if (alpha >= hi) return normalizer_;
  switch (path_) {
    case Path::ConstantWeight:
      return weight_.m.constant_value() * model_.cdf(alpha);
    case Path::UniformLinear:
      return weight_.m.slope() * 0.5 * (alpha * alpha - lo * lo) / (hi - lo);
    case Path::UniformStep:
    case Path::Numeric: {
      const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), alpha);
      const std::size_t i = static_cast<std::size_t>(it - nodes_.begin()) - 1;
      if (path_ == Path::UniformStep) {
        const double mid = 0.5 * (nodes_[i] + alpha);
        return cum_[i] + weight_.m.eval(mid) * (alpha - nodes_[i]) / (hi - lo);
      }
      return cum_[i] +
             adaptive_simpson([this](double y) { return integrand(y); }, nodes_[i], alpha, 1e-13);
    }
  }
  return 0.0;
}

double LimitCdf::eval(double alpha) const {
  return std::clamp(unnormalized(alpha) / normalizer_, 0.0, 1.0);
}

double LimitCdf::quantile(double p) const {
  require(p > 0.0 && p < 1.0, Errc::invalid_argument, "quantile level must lie in (0,1)");
  const double lo = model_.support_lo();
  const double hi = model_.support_hi();
  auto bisect = [&](auto&& pred) {
    double a = lo, b = hi;
    while (b - a > 1e-10) {
      const double mid = 0.5 * (a + b);
      if (pred(eval(mid)))
        b = mid;
      else
        a = mid;
    }
    return b;
  };
  const double left = bisect([&](double v) { return v >= p; });
  const double right = bisect([&](double v) { return v > p; });
  require(right - left <= 1e-6 * (hi - lo) + 1e-9, Errc::runtime,
          "limit c.d.f. is flat at the requested level; quantile not unique");
  return left;
}

std::string InclusionEstimates::to_json() const {
  char buf[640];
  std::snprintf(buf, sizeof buf,
                "{\"m_hat\":%.17g,\"v_hat\":%.17g,\"mprime_12\":%.17g,\"mprime_21\":%.17g,"
                "\"c_hat\":%.17g,\"d_hat\":%.17g,\"se_m\":%.17g,\"se_v\":%.17g,"
                "\"se_mprime_12\":%.17g,\"se_mprime_21\":%.17g,\"se_c\":%.17g,\"se_d\":%.17g,"
                "\"reps\":%lld}",
                m_hat, v_hat, mprime_12, mprime_21, c_hat, d_hat, se_m, se_v, se_mprime_12,
                se_mprime_21, se_c, se_d, static_cast<long long>(reps));
  return buf;
}

InclusionEstimates m_monte_carlo(const DesignSpec& design, const SuperpopModel& model, double y,
                                 std::int64_t n_pop, std::int64_t reps, std::uint64_t seed) {
  require(reps >= 100, Errc::invalid_argument, "m_monte_carlo: reps must be >= 100");
  check_in_support(model, y);
  std::vector<double> c1(static_cast<std::size_t>(reps));
  for (std::int64_t r = 0; r < reps; ++r) {
    const Population pop =
        conditioned_population(model, n_pop, {y}, mix64(seed, static_cast<std::uint64_t>(r), 1));
    const IndicatorVector ind = sample(design, pop, mix64(seed, static_cast<std::uint64_t>(r), 2));
    c1[static_cast<std::size_t>(r)] = static_cast<double>(ind.counts[0]);
  }
  InclusionEstimates est;
  est.reps = reps;
  est.m_hat = mean_of(c1);
  est.v_hat = central_moment(c1, est.m_hat, 2);
  est.se_m = se_of_mean(c1, est.m_hat);
  est.se_v = se_of_variance(c1, est.m_hat, est.v_hat);
  return est;
}

InclusionEstimates pairwise_monte_carlo(const DesignSpec& design, const SuperpopModel& model,
                                        double y1, double y2, std::int64_t n_pop, std::int64_t reps,
                                        std::uint64_t seed) {
  require(n_pop >= 2, Errc::invalid_argument, "pairwise_monte_carlo: N must be >= 2");
  require(reps >= 100, Errc::invalid_argument, "pairwise_monte_carlo: reps must be >= 100");
  check_in_support(model, y1);
  check_in_support(model, y2);
  std::vector<double> c1(static_cast<std::size_t>(reps));
  std::vector<double> c2(static_cast<std::size_t>(reps));
  std::vector<double> c12(static_cast<std::size_t>(reps));
  for (std::int64_t r = 0; r < reps; ++r) {
    const Population pop =
        conditioned_population(model, n_pop, {y1, y2}, mix64(seed, static_cast<std::uint64_t>(r), 1));
    const IndicatorVector ind = sample(design, pop, mix64(seed, static_cast<std::uint64_t>(r), 2));
    c1[static_cast<std::size_t>(r)] = static_cast<double>(ind.counts[0]);
    c2[static_cast<std::size_t>(r)] = static_cast<double>(ind.counts[1]);
    c12[static_cast<std::size_t>(r)] = c1[static_cast<std::size_t>(r)] * c2[static_cast<std::size_t>(r)];
  }
  InclusionEstimates est;
  est.reps = reps;
  est.mprime_12 = mean_of(c1);
  est.mprime_21 = mean_of(c2);
  est.d_hat = mean_of(c12);
  est.c_hat = est.d_hat - est.mprime_12 * est.mprime_21;  // plug-in: d = c + m'12 m'21 exactly
  est.se_mprime_12 = se_of_mean(c1, est.mprime_12);
  est.se_mprime_21 = se_of_mean(c2, est.mprime_21);
  est.se_d = se_of_mean(c12, est.d_hat);
  double cross = 0.0;
  for (std::int64_t r = 0; r < reps; ++r) {
    const double u = (c1[static_cast<std::size_t>(r)] - est.mprime_12) *
                     (c2[static_cast<std::size_t>(r)] - est.mprime_21);
    cross += u * u;
  }
  cross /= static_cast<double>(reps);
  est.se_c = std::sqrt(std::max(cross - est.c_hat * est.c_hat, 0.0) / static_cast<double>(reps));
  return est;
}

std::optional<TheoreticalM> m_theoretical(const DesignSpec& design, const SuperpopModel& model,
                                          double y, std::int64_t n_pop) {
  switch (design.variant) {
    case DesignVariant::Srswor: {
      const double n = static_cast<double>(design.size.resolve(n_pop));
      return TheoreticalM{n / static_cast<double>(n_pop), false};
    }
    case DesignVariant::Bernoulli:
      return TheoreticalM{design.p, false};
    case DesignVariant::LengthBiasedPoisson: {
      const double t = design.tau * (1.0 + design.tau_c / static_cast<double>(n_pop));
      return TheoreticalM{t * y, false};
    }
    case DesignVariant::CutOff: {
      const double rho = design.size.rate ? *design.size.rate
                                          : static_cast<double>(*design.size.fixed) /
                                                static_cast<double>(n_pop);
      const double ft = model.cdf(design.tau);
      const double z = y <= design.tau ? 1.0 : 0.0;
      const double kappa = (rho > ft && ft < 1.0) ? (rho - ft) / (1.0 - ft) : 0.0;
      const double value =
          design.mode == CutoffMode::TakeAll ? z + (1.0 - z) * kappa : (1.0 - z) * kappa;
      return TheoreticalM{value, true};
    }
    case DesignVariant::PpsWithReplacement: {
      const double rho = design.size.rate ? *design.size.rate
                                          : static_cast<double>(*design.size.fixed) /
                                                static_cast<double>(n_pop);
      return TheoreticalM{rho * y / model.moment(1), true};
    }
    case DesignVariant::EndogenousStrata: {
      const double alpha = model.cdf(y);
      double cum = 0.0;
      for (std::size_t h = 0; h < design.stratum_fractions.size(); ++h) {
        cum += design.stratum_fractions[h];
        if (alpha <= cum || h + 1 == design.stratum_fractions.size())
          return TheoreticalM{design.sampling_fractions[h], true};
      }
      return TheoreticalM{design.sampling_fractions.back(), true};
    }
    default:
      return std::nullopt;
  }
}

WeightSpec builtin_weight(const DesignSpec& design, const SuperpopModel& model) {
  const double hi = model.support_hi();
  switch (design.variant) {
    case DesignVariant::Srswor: {
      const double c = design.size.rate ? *design.size.rate : 1.0;
      return WeightSpec::make(Weight::constant(c), model, c,
                              "constant weight (non-informative); the limit c.d.f. equals F");
    }
    case DesignVariant::Bernoulli:
      return WeightSpec::make(Weight::constant(design.p), model, design.p,
                              "constant weight p (non-informative)");
    case DesignVariant::PoissonFixedPi: {
      double mean_pi = 0.0;
      for (double x : design.pi_pattern) mean_pi += x;
      mean_pi /= static_cast<double>(design.pi_pattern.size());
      return WeightSpec::make(Weight::constant(mean_pi), model, 1.0,
                              "constant weight mean(pi) (non-informative)");
    }
    case DesignVariant::PoissonProportionalZ: {
      const double c = design.n_star.rate ? *design.n_star.rate : 1.0;
      return WeightSpec::make(Weight::constant(c), model, 1.0,
                              "constant weight (Z independent of Y; non-informative)");
    }
    case DesignVariant::LengthBiasedPoisson: {
      const double bound = design.tau * (1.0 + std::max(design.tau_c, 0.0)) * hi;
      return WeightSpec::make(Weight::linear(design.tau), model, std::max(bound, design.tau * hi),
                              "length-biased limit m(y) = tau * y");
    }
    case DesignVariant::PpsWithReplacement: {
      require(design.size.rate.has_value(), Errc::no_limit,
              "PPS with a fixed draw count has vanishing sampling rate; use a rate rule");
      const double slope = *design.size.rate / model.moment(1);
      return WeightSpec::make(Weight::linear(slope), model, 2.0 * slope * hi,
                              "PPS limit m(y) = rate * y / E[Y]");
    }
    case DesignVariant::CutOff: {
      const double ft = model.cdf(design.tau);
      const double rho = design.size.rate ? *design.size.rate : 0.0;
      const double kappa = (rho > ft && ft < 1.0) ? (rho - ft) / (1.0 - ft) : 0.0;
      const bool take_all = design.mode == CutoffMode::TakeAll;
      if (!take_all)
        require(kappa > 0.0, Errc::no_limit,
                "cut-off limit weight is identically zero (rate <= F(tau))");
      if (ft <= 0.0 || ft >= 1.0) {
        // Threshold outside the support: the step degenerates to a constant.
        const double c = take_all ? (ft >= 1.0 ? 1.0 : kappa) : kappa;
        require(c > 0.0, Errc::no_limit, "cut-off limit weight is identically zero");
        return WeightSpec::make(Weight::constant(c), model, 1.0, "degenerate cut-off limit");
      }
      const double below = take_all ? 1.0 : 0.0;
      return WeightSpec::make(Weight::step({design.tau}, {below, kappa}), model, 1.0,
                              take_all ? "take-all limit: 1 below tau, (rho-F)/(1-F) above"
                                       : "cut-off limit: 0 below tau, (rho-F)/(1-F) above");
    }
    case DesignVariant::EndogenousStrata: {
      std::vector<double> edges;
      double cum = 0.0;
      for (std::size_t h = 0; h + 1 < design.stratum_fractions.size(); ++h) {
        cum += design.stratum_fractions[h];
        edges.push_back(model.quantile(cum));
      }
      double bound = 0.0;
      for (double f : design.sampling_fractions) bound = std::max(bound, f);
      return WeightSpec::make(Weight::step(std::move(edges), design.sampling_fractions), model,
                              bound, "endogenous stratification limit G(F(y))");
    }
    case DesignVariant::ClusterSplit:
      fail(Errc::no_limit, "cluster design has no limit c.d.f.: condition A1.1 fails");
    case DesignVariant::PoissonPathological:
      fail(Errc::no_limit, "pathological Poisson design has no limit c.d.f.: condition A4 fails");
  }
  fail(Errc::runtime, "unreachable");
}

double sample_pdf(const WeightSpec& m_gamma, const SuperpopModel& model, double y) {
  require(m_gamma.normalizer > 0.0, Errc::no_limit, "sample_pdf: zero normalizer");
  return m_gamma.m.eval(y) * model.density(y) / m_gamma.normalizer;
}

}  // namespace infsel
