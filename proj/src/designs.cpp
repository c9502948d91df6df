#include "designs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "error.hpp"
#include "rng.hpp"

namespace infsel {

namespace {

constexpr double kProbEps = 1e-12;

std::vector<double> resolved_pi(const DesignSpec& d, std::int64_t n_pop) {
  std::vector<double> pi(static_cast<std::size_t>(n_pop));
  for (std::int64_t k = 0; k < n_pop; ++k)
    pi[static_cast<std::size_t>(k)] = d.pi_pattern[static_cast<std::size_t>(k) % d.pi_pattern.size()];
  return pi;
}

double tau_at(const DesignSpec& d, std::int64_t n_pop) {
  return d.tau * (1.0 + d.tau_c / static_cast<double>(n_pop));
}

// Partial Fisher-Yates: marks n of the indices in `pool` (consumed in place).
void srswor_mark(std::vector<std::int64_t>& pool, std::int64_t n, SplitMix64& rng,
                 std::vector<std::int32_t>& counts) {
  const std::int64_t m = static_cast<std::int64_t>(pool.size());
  for (std::int64_t i = 0; i < n; ++i) {
    const std::int64_t j = i + static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(m - i)));
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    counts[static_cast<std::size_t>(pool[static_cast<std::size_t>(i)])] = 1;
  }
}

// Population indices ordered by response value, ties broken by index.
std::vector<std::int64_t> order_by_response(const Population& pop) {
  std::vector<std::int64_t> idx(static_cast<std::size_t>(pop.size()));
  std::iota(idx.begin(), idx.end(), std::int64_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::int64_t a, std::int64_t b) {
    return pop.responses[static_cast<std::size_t>(a)] < pop.responses[static_cast<std::size_t>(b)];
  });
  return idx;
}

double factorial(std::int64_t n) {
  double f = 1.0;
  for (std::int64_t i = 2; i <= n; ++i) f *= static_cast<double>(i);
  return f;
}

double binomial_coeff(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (std::int64_t i = 0; i < k; ++i) c = c * static_cast<double>(n - i) / static_cast<double>(i + 1);
  return c;
}

// Visits every k-subset of {0..m-1} in lexicographic order.
template <class Visit>
void for_each_combination(std::int64_t m, std::int64_t k, Visit&& visit) {
  std::vector<std::int64_t> comb(static_cast<std::size_t>(k));
  std::iota(comb.begin(), comb.end(), std::int64_t{0});
  if (k == 0) {
    visit(comb);
    return;
  }
  for (;;) {
    visit(comb);
    std::int64_t i = k - 1;
    while (i >= 0 && comb[static_cast<std::size_t>(i)] == m - k + i) --i;
    if (i < 0) break;
    ++comb[static_cast<std::size_t>(i)];
    for (std::int64_t j = i + 1; j < k; ++j)
      comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
  }
}

void append_product_bernoulli(std::vector<SupportPoint>& out, const std::vector<double>& pi) {
  const std::int64_t n = static_cast<std::int64_t>(pi.size());
  require(n <= 62, Errc::infeasible, "enumeration infeasible: too many elements");
  const std::int64_t states = std::int64_t{1} << n;
  require(states <= kEnumerationLimit, Errc::infeasible, "enumeration infeasible: > 2^21 states");
  out.reserve(static_cast<std::size_t>(states));
  for (std::int64_t mask = 0; mask < states; ++mask) {
    IndicatorVector ind;
    ind.counts.assign(static_cast<std::size_t>(n), 0);
    double prob = 1.0;
    for (std::int64_t k = 0; k < n; ++k) {
      if ((mask >> k) & 1) {
        ind.counts[static_cast<std::size_t>(k)] = 1;
        ++ind.total;
        prob *= pi[static_cast<std::size_t>(k)];
      } else {
        prob *= 1.0 - pi[static_cast<std::size_t>(k)];
      }
    }
    out.push_back({std::move(ind), prob});
  }
}

// Merges duplicate indicator vectors, summing probabilities (used by the
// mixture designs whose components can share support points).
std::vector<SupportPoint> merge_support(std::vector<SupportPoint> pts) {
  std::sort(pts.begin(), pts.end(),
            [](const SupportPoint& x, const SupportPoint& y) { return x.indicator.counts < y.indicator.counts; });
  std::vector<SupportPoint> out;
  for (auto& p : pts) {
    if (!out.empty() && out.back().indicator.counts == p.indicator.counts)
      out.back().prob += p.prob;
    else
      out.push_back(std::move(p));
  }
  std::erase_if(out, [](const SupportPoint& p) { return p.prob <= 0.0; });
  return out;
}

}  // namespace

std::int64_t SizeRule::resolve(std::int64_t n_pop) const {
  if (fixed) return *fixed;
  require(rate.has_value(), Errc::invalid_argument, "size rule has neither fixed count nor rate");
  return static_cast<std::int64_t>(std::floor(*rate * static_cast<double>(n_pop)));
}

IndicatorVector IndicatorVector::from_counts(std::vector<std::int32_t> c) {
  IndicatorVector v;
  v.counts = std::move(c);
  v.total = std::accumulate(v.counts.begin(), v.counts.end(), std::int64_t{0});
  return v;
}

DesignSpec DesignSpec::srswor(std::int64_t n) {
  DesignSpec d;
  d.variant = DesignVariant::Srswor;
  d.size.fixed = n;
  d.validate();
  return d;
}

DesignSpec DesignSpec::srswor_rate(double rate) {
  DesignSpec d;
  d.variant = DesignVariant::Srswor;
  d.size.rate = rate;
  d.validate();
  return d;
}

DesignSpec DesignSpec::census() { return srswor_rate(1.0); }

DesignSpec DesignSpec::bernoulli(double p) {
  DesignSpec d;
  d.variant = DesignVariant::Bernoulli;
  d.p = p;
  d.validate();
  return d;
}

DesignSpec DesignSpec::poisson_fixed_pi(std::vector<double> pi, bool permuted) {
  DesignSpec d;
  d.variant = DesignVariant::PoissonFixedPi;
  d.pi_pattern = std::move(pi);
  d.permuted = permuted;
  d.validate();
  return d;
}

DesignSpec DesignSpec::poisson_proportional_z(SizeRule n_star, std::shared_ptr<const SuperpopModel> z_law) {
  DesignSpec d;
  d.variant = DesignVariant::PoissonProportionalZ;
  d.n_star = n_star;
  d.z_law = std::move(z_law);
  d.validate();
  return d;
}

DesignSpec DesignSpec::poisson_pathological(double a, double b) {
  DesignSpec d;
  d.variant = DesignVariant::PoissonPathological;
  d.a = a;
  d.b = b;
  d.validate();
  return d;
}

DesignSpec DesignSpec::length_biased(double tau, double c) {
  DesignSpec d;
  d.variant = DesignVariant::LengthBiasedPoisson;
  d.tau = tau;
  d.tau_c = c;
  d.validate();
  return d;
}

DesignSpec DesignSpec::cluster_split(double tau) {
  DesignSpec d;
  d.variant = DesignVariant::ClusterSplit;
  d.tau = tau;
  d.validate();
  return d;
}

DesignSpec DesignSpec::cutoff(double tau, double rate, CutoffMode mode) {
  DesignSpec d;
  d.variant = DesignVariant::CutOff;
  d.tau = tau;
  d.size.rate = rate;
  d.mode = mode;
  d.validate();
  return d;
}

DesignSpec DesignSpec::pps_with_replacement(SizeRule n) {
  DesignSpec d;
  d.variant = DesignVariant::PpsWithReplacement;
  d.size = n;
  d.validate();
  return d;
}

DesignSpec DesignSpec::endogenous_strata(std::vector<double> stratum_fractions,
                                         std::vector<double> sampling_fractions) {
  DesignSpec d;
  d.variant = DesignVariant::EndogenousStrata;
  d.stratum_fractions = std::move(stratum_fractions);
  d.sampling_fractions = std::move(sampling_fractions);
  d.validate();
  return d;
}

void DesignSpec::validate() const {
  switch (variant) {
    case DesignVariant::Srswor:
    case DesignVariant::PpsWithReplacement:
      require(size.set(), Errc::invalid_argument, "sample size rule required");
      if (size.fixed) require(*size.fixed >= 1, Errc::invalid_argument, "fixed sample size must be >= 1");
      if (size.rate)
        require(*size.rate > 0.0 && *size.rate <= 1.0, Errc::invalid_argument, "rate must lie in (0,1]");
      break;
    case DesignVariant::Bernoulli:
      // p = 1 is admitted as the degenerate census case.
      require(p > 0.0 && p <= 1.0, Errc::invalid_argument, "Bernoulli p must lie in (0,1]");
      break;
    case DesignVariant::PoissonFixedPi:
      require(!pi_pattern.empty(), Errc::invalid_argument, "pi pattern must be non-empty");
      for (double x : pi_pattern)
        require(x > 0.0 && x <= 1.0, Errc::invalid_argument, "pi entries must lie in (0,1]");
      break;
    case DesignVariant::PoissonProportionalZ:
      require(n_star.set(), Errc::invalid_argument, "n_star rule required");
      require(z_law != nullptr, Errc::invalid_argument, "z law required");
      break;
    case DesignVariant::PoissonPathological:
      require(a > 0.0 && a <= 1.0 && b > 0.0 && b <= 1.0, Errc::invalid_argument,
              "pathological parameters must lie in (0,1]");
      require(a != b, Errc::invalid_argument, "pathological parameters must differ");
      break;
    case DesignVariant::LengthBiasedPoisson:
      require(tau > 0.0, Errc::invalid_argument, "length-biased tau must be positive");
      break;
    case DesignVariant::ClusterSplit:
      require(std::isfinite(tau), Errc::invalid_argument, "cluster threshold must be finite");
      break;
    case DesignVariant::CutOff:
      require(std::isfinite(tau), Errc::invalid_argument, "cutoff threshold must be finite");
      require(size.set(), Errc::invalid_argument, "cutoff rate rule required");
      if (size.rate) require(*size.rate >= 0.0 && *size.rate <= 1.0, Errc::invalid_argument, "rate in [0,1]");
      break;
    case DesignVariant::EndogenousStrata: {
      require(!stratum_fractions.empty(), Errc::invalid_argument, "strata required");
      require(stratum_fractions.size() == sampling_fractions.size(), Errc::invalid_argument,
              "stratum and sampling fraction counts must match");
      double sum = 0.0;
      for (double f : stratum_fractions) {
        require(f > 0.0, Errc::invalid_argument, "stratum fractions must be positive");
        sum += f;
      }
      require(std::abs(sum - 1.0) <= 1e-9, Errc::invalid_argument, "stratum fractions must sum to 1");
      for (double f : sampling_fractions)
        require(f > 0.0 && f <= 1.0, Errc::invalid_argument, "sampling fractions must lie in (0,1]");
      break;
    }
  }
}

void DesignSpec::validate_for(std::int64_t n_pop) const {
  require(n_pop >= 1, Errc::invalid_argument, "population must be non-empty");
  switch (variant) {
    case DesignVariant::Srswor: {
      const std::int64_t n = size.resolve(n_pop);
      require(n >= 1 && n <= n_pop, Errc::invalid_argument, "SRSWOR needs 1 <= n <= N");
      break;
    }
    case DesignVariant::PpsWithReplacement: {
      const std::int64_t n = size.resolve(n_pop);
      require(n >= 1 && n < n_pop, Errc::invalid_argument, "PPS needs 1 <= n < N");
      break;
    }
    case DesignVariant::PoissonProportionalZ:
      require(n_star.resolve(n_pop) >= 1, Errc::invalid_argument, "n_star must resolve to >= 1");
      break;
    case DesignVariant::EndogenousStrata:
      resolve_strata(*this, n_pop);
      break;
    default:
      break;
  }
}

bool DesignSpec::independent_of_y() const {
  switch (variant) {
    case DesignVariant::Srswor:
    case DesignVariant::Bernoulli:
    case DesignVariant::PoissonFixedPi:
    case DesignVariant::PoissonProportionalZ:
    case DesignVariant::PoissonPathological:
      return true;
    default:
      return false;
  }
}

bool DesignSpec::enumerable() const { return variant != DesignVariant::PoissonProportionalZ; }

bool DesignSpec::exchangeable() const {
  if (variant != DesignVariant::PoissonFixedPi) return true;
  if (permuted) return true;
  const double first = pi_pattern.front();
  return std::all_of(pi_pattern.begin(), pi_pattern.end(), [&](double x) { return x == first; });
}

std::string DesignSpec::tag() const {
  char buf[128];
  switch (variant) {
    case DesignVariant::Srswor:
      if (size.rate)
        std::snprintf(buf, sizeof buf, *size.rate == 1.0 ? "census" : "srswor(rate=%g)", *size.rate);
      else
        std::snprintf(buf, sizeof buf, "srswor(n=%lld)", static_cast<long long>(*size.fixed));
      break;
    case DesignVariant::Bernoulli:
      std::snprintf(buf, sizeof buf, "bernoulli(p=%g)", p);
      break;
    case DesignVariant::PoissonFixedPi:
      std::snprintf(buf, sizeof buf, "poisson_fixed_pi(%zu;%s)", pi_pattern.size(),
                    permuted ? "permuted" : "fixed");
      break;
    case DesignVariant::PoissonProportionalZ:
      std::snprintf(buf, sizeof buf, "poisson_proportional_z");
      break;
    case DesignVariant::PoissonPathological:
      std::snprintf(buf, sizeof buf, "poisson_pathological(a=%g;b=%g)", a, b);
      break;
    case DesignVariant::LengthBiasedPoisson:
      std::snprintf(buf, sizeof buf, "length_biased(tau=%g;c=%g)", tau, tau_c);
      break;
    case DesignVariant::ClusterSplit:
      std::snprintf(buf, sizeof buf, "cluster_split(tau=%g)", tau);
      break;
    case DesignVariant::CutOff:
      std::snprintf(buf, sizeof buf, "cutoff(tau=%g;rate=%g;%s)", tau,
                    size.rate ? *size.rate : 0.0, mode == CutoffMode::TakeAll ? "take_all" : "cutoff");
      break;
    case DesignVariant::PpsWithReplacement:
      if (size.rate)
        std::snprintf(buf, sizeof buf, "pps_wr(rate=%g)", *size.rate);
      else
        std::snprintf(buf, sizeof buf, "pps_wr(n=%lld)", static_cast<long long>(*size.fixed));
      break;
    case DesignVariant::EndogenousStrata:
      std::snprintf(buf, sizeof buf, "endogenous_strata(H=%zu)", stratum_fractions.size());
      break;
  }
  return buf;
}

StrataLayout resolve_strata(const DesignSpec& design, std::int64_t n_pop) {
  const std::size_t h_count = design.stratum_fractions.size();
  StrataLayout out;
  out.stratum_sizes.assign(h_count, 0);
  out.sample_sizes.assign(h_count, 0);

  // Largest-remainder apportionment; remainder ties broken by stratum index.
  std::int64_t assigned = 0;
  std::vector<std::pair<double, std::size_t>> remainders(h_count);
  for (std::size_t h = 0; h < h_count; ++h) {
    const double exact = design.stratum_fractions[h] * static_cast<double>(n_pop);
    out.stratum_sizes[h] = static_cast<std::int64_t>(std::floor(exact));
    assigned += out.stratum_sizes[h];
    remainders[h] = {exact - std::floor(exact), h};
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& x, const auto& y) { return x.first > y.first; });
  for (std::int64_t r = 0; r < n_pop - assigned; ++r)
    ++out.stratum_sizes[remainders[static_cast<std::size_t>(r) % h_count].second];

  for (std::size_t h = 0; h < h_count; ++h) {
    require(out.stratum_sizes[h] >= 1, Errc::invalid_argument,
            "population too small for the requested strata");
    const std::int64_t nh = std::llround(design.sampling_fractions[h] *
                                         static_cast<double>(out.stratum_sizes[h]));
    out.sample_sizes[h] = std::clamp<std::int64_t>(nh, 1, out.stratum_sizes[h]);
  }
  return out;
}

IndicatorVector sample(const DesignSpec& design, const Population& population, std::uint64_t seed,
                       SampleStats* stats) {
  const std::int64_t n_pop = population.size();
  design.validate_for(n_pop);
  SplitMix64 rng(seed);
  IndicatorVector ind;
  ind.counts.assign(static_cast<std::size_t>(n_pop), 0);

  switch (design.variant) {
    case DesignVariant::Srswor: {
      const std::int64_t n = design.size.resolve(n_pop);
      std::vector<std::int64_t> pool(static_cast<std::size_t>(n_pop));
      std::iota(pool.begin(), pool.end(), std::int64_t{0});
      srswor_mark(pool, n, rng, ind.counts);
      break;
    }
    case DesignVariant::Bernoulli: {
      for (auto& c : ind.counts) c = rng.next_double() < design.p ? 1 : 0;
      break;
    }
    case DesignVariant::PoissonFixedPi: {
      std::vector<double> pi = resolved_pi(design, n_pop);
      if (design.permuted) {
        for (std::int64_t i = n_pop - 1; i > 0; --i) {
          const auto j = rng.next_below(static_cast<std::uint64_t>(i + 1));
          std::swap(pi[static_cast<std::size_t>(i)], pi[j]);
        }
      }
      for (std::int64_t k = 0; k < n_pop; ++k)
        ind.counts[static_cast<std::size_t>(k)] = rng.next_double() < pi[static_cast<std::size_t>(k)] ? 1 : 0;
      break;
    }
    case DesignVariant::PoissonProportionalZ: {
      const std::int64_t nstar = design.n_star.resolve(n_pop);
      std::vector<double> z(static_cast<std::size_t>(n_pop));
      double z_sum = 0.0;
      for (auto& zk : z) {
        zk = design.z_law->quantile(rng.next_double());
        z_sum += zk;
      }
      require(z_sum > 0.0, Errc::runtime, "degenerate Z draw: sum is zero");
      for (std::int64_t k = 0; k < n_pop; ++k) {
        double pik = static_cast<double>(nstar) * z[static_cast<std::size_t>(k)] / z_sum;
        if (pik > 1.0) {
          pik = 1.0;
          if (stats) ++stats->clamped_inclusion_probs;
        }
        ind.counts[static_cast<std::size_t>(k)] = rng.next_double() < pik ? 1 : 0;
      }
      break;
    }
    case DesignVariant::PoissonPathological: {
      // One shared coin per call, then independent Bernoulli draws.
      const double pi = rng.next_double() < 0.5 ? design.a : design.b;
      for (auto& c : ind.counts) c = rng.next_double() < pi ? 1 : 0;
      break;
    }
    case DesignVariant::LengthBiasedPoisson: {
      const double t = tau_at(design, n_pop);
      for (std::int64_t k = 0; k < n_pop; ++k) {
        const double pk = t * population.responses[static_cast<std::size_t>(k)];
        require(pk >= 0.0 && pk <= 1.0, Errc::invalid_argument,
                "length-biased design: tau * y must lie in [0,1]");
        ind.counts[static_cast<std::size_t>(k)] = rng.next_double() < pk ? 1 : 0;
      }
      break;
    }
    case DesignVariant::ClusterSplit: {
      const bool lower = rng.next_double() < 0.5;
      for (std::int64_t k = 0; k < n_pop; ++k) {
        const bool below = population.responses[static_cast<std::size_t>(k)] <= design.tau;
        ind.counts[static_cast<std::size_t>(k)] = (below == lower) ? 1 : 0;
      }
      break;
    }
    case DesignVariant::CutOff: {
      std::vector<std::int64_t> above;
      std::int64_t below_count = 0;
      for (std::int64_t k = 0; k < n_pop; ++k) {
        if (population.responses[static_cast<std::size_t>(k)] <= design.tau) {
          ++below_count;
          if (design.mode == CutoffMode::TakeAll) ind.counts[static_cast<std::size_t>(k)] = 1;
        } else {
          above.push_back(k);
        }
      }
      const std::int64_t n = design.size.resolve(n_pop);
      const std::int64_t s = std::min<std::int64_t>(n, n_pop - below_count);
      if (s > 0) srswor_mark(above, s, rng, ind.counts);
      break;
    }
    case DesignVariant::PpsWithReplacement: {
      const std::int64_t n = design.size.resolve(n_pop);
      std::vector<double> cum(static_cast<std::size_t>(n_pop));
      double total = 0.0;
      for (std::int64_t k = 0; k < n_pop; ++k) {
        const double y = population.responses[static_cast<std::size_t>(k)];
        require(y > 0.0, Errc::invalid_argument, "PPS requires strictly positive responses");
        total += y;
        cum[static_cast<std::size_t>(k)] = total;
      }
      for (std::int64_t h = 0; h < n; ++h) {
        const double u = rng.next_double() * total;
        const auto it = std::upper_bound(cum.begin(), cum.end(), u);
        const std::size_t k = std::min(static_cast<std::size_t>(it - cum.begin()), cum.size() - 1);
        ++ind.counts[k];
      }
      break;
    }
    case DesignVariant::EndogenousStrata: {
      const StrataLayout layout = resolve_strata(design, n_pop);
      const std::vector<std::int64_t> order = order_by_response(population);
      std::size_t offset = 0;
      for (std::size_t h = 0; h < layout.stratum_sizes.size(); ++h) {
        std::vector<std::int64_t> stratum(order.begin() + static_cast<std::ptrdiff_t>(offset),
                                          order.begin() + static_cast<std::ptrdiff_t>(offset) +
                                              static_cast<std::ptrdiff_t>(layout.stratum_sizes[h]));
        srswor_mark(stratum, layout.sample_sizes[h], rng, ind.counts);
        offset += static_cast<std::size_t>(layout.stratum_sizes[h]);
      }
      break;
    }
  }

  ind.total = std::accumulate(ind.counts.begin(), ind.counts.end(), std::int64_t{0});
  return ind;
}

std::vector<SupportPoint> enumerate_support(const DesignSpec& design, const Population& population) {
  const std::int64_t n_pop = population.size();
  design.validate_for(n_pop);
  require(design.enumerable(), Errc::unsupported,
          "enumeration unsupported for this variant (continuous inclusion probabilities)");

  std::vector<SupportPoint> out;
  switch (design.variant) {
    case DesignVariant::Srswor: {
      const std::int64_t n = design.size.resolve(n_pop);
      const double combos = binomial_coeff(n_pop, n);
      require(combos <= static_cast<double>(kEnumerationLimit), Errc::infeasible,
              "enumeration infeasible: too many subsets");
      const double prob = 1.0 / combos;
      for_each_combination(n_pop, n, [&](const std::vector<std::int64_t>& comb) {
        IndicatorVector ind;
        ind.counts.assign(static_cast<std::size_t>(n_pop), 0);
        for (std::int64_t k : comb) ind.counts[static_cast<std::size_t>(k)] = 1;
        ind.total = n;
        out.push_back({std::move(ind), prob});
      });
      break;
    }
    case DesignVariant::Bernoulli: {
      append_product_bernoulli(out, std::vector<double>(static_cast<std::size_t>(n_pop), design.p));
      out = merge_support(std::move(out));  // p = 1 collapses to a single point
      break;
    }
    case DesignVariant::PoissonFixedPi: {
      std::vector<double> pi = resolved_pi(design, n_pop);
      if (!design.permuted) {
        append_product_bernoulli(out, pi);
        out = merge_support(std::move(out));
        break;
      }
      std::sort(pi.begin(), pi.end());
      double n_perms = 0.0;
      {
        std::vector<double> tmp = pi;
        do { n_perms += 1.0; } while (std::next_permutation(tmp.begin(), tmp.end()));
      }
      require(n_perms * std::pow(2.0, static_cast<double>(n_pop)) <= 16.0 * kEnumerationLimit,
              Errc::infeasible, "enumeration infeasible: too many permutations");
      std::vector<SupportPoint> acc;
      do {
        std::vector<SupportPoint> one;
        append_product_bernoulli(one, pi);
        for (auto& pt : one) pt.prob /= n_perms;
        acc.insert(acc.end(), std::make_move_iterator(one.begin()), std::make_move_iterator(one.end()));
        if (acc.size() > static_cast<std::size_t>(4 * kEnumerationLimit)) acc = merge_support(std::move(acc));
      } while (std::next_permutation(pi.begin(), pi.end()));
      out = merge_support(std::move(acc));
      break;
    }
    case DesignVariant::PoissonPathological: {
      std::vector<SupportPoint> one;
      append_product_bernoulli(one, std::vector<double>(static_cast<std::size_t>(n_pop), design.a));
      for (auto& pt : one) pt.prob *= 0.5;
      std::vector<SupportPoint> two;
      append_product_bernoulli(two, std::vector<double>(static_cast<std::size_t>(n_pop), design.b));
      for (auto& pt : two) pt.prob *= 0.5;
      one.insert(one.end(), std::make_move_iterator(two.begin()), std::make_move_iterator(two.end()));
      out = merge_support(std::move(one));
      break;
    }
    case DesignVariant::LengthBiasedPoisson: {
      const double t = tau_at(design, n_pop);
      std::vector<double> pi(static_cast<std::size_t>(n_pop));
      for (std::int64_t k = 0; k < n_pop; ++k) {
        pi[static_cast<std::size_t>(k)] = t * population.responses[static_cast<std::size_t>(k)];
        require(pi[static_cast<std::size_t>(k)] >= 0.0 && pi[static_cast<std::size_t>(k)] <= 1.0,
                Errc::invalid_argument, "length-biased design: tau * y must lie in [0,1]");
      }
      append_product_bernoulli(out, pi);
      out = merge_support(std::move(out));
      break;
    }
    case DesignVariant::ClusterSplit: {
      IndicatorVector lower, upper;
      lower.counts.assign(static_cast<std::size_t>(n_pop), 0);
      upper.counts.assign(static_cast<std::size_t>(n_pop), 0);
      for (std::int64_t k = 0; k < n_pop; ++k) {
        if (population.responses[static_cast<std::size_t>(k)] <= design.tau) {
          lower.counts[static_cast<std::size_t>(k)] = 1;
          ++lower.total;
        } else {
          upper.counts[static_cast<std::size_t>(k)] = 1;
          ++upper.total;
        }
      }
      out.push_back({std::move(lower), 0.5});
      out.push_back({std::move(upper), 0.5});
      out = merge_support(std::move(out));
      break;
    }
    case DesignVariant::CutOff: {
      std::vector<std::int64_t> above;
      std::vector<std::int64_t> below;
      for (std::int64_t k = 0; k < n_pop; ++k)
        (population.responses[static_cast<std::size_t>(k)] <= design.tau ? below : above).push_back(k);
      const std::int64_t n = design.size.resolve(n_pop);
      const std::int64_t s = std::min<std::int64_t>(n, static_cast<std::int64_t>(above.size()));
      const double combos = binomial_coeff(static_cast<std::int64_t>(above.size()), s);
      require(combos <= static_cast<double>(kEnumerationLimit), Errc::infeasible,
              "enumeration infeasible: too many subsets");
      const double prob = 1.0 / combos;
      for_each_combination(static_cast<std::int64_t>(above.size()), s,
                           [&](const std::vector<std::int64_t>& comb) {
                             IndicatorVector ind;
                             ind.counts.assign(static_cast<std::size_t>(n_pop), 0);
                             if (design.mode == CutoffMode::TakeAll)
                               for (std::int64_t k : below) ind.counts[static_cast<std::size_t>(k)] = 1;
                             for (std::int64_t i : comb)
                               ind.counts[static_cast<std::size_t>(above[static_cast<std::size_t>(i)])] = 1;
                             ind.total = std::accumulate(ind.counts.begin(), ind.counts.end(), std::int64_t{0});
                             out.push_back({std::move(ind), prob});
                           });
      break;
    }
    case DesignVariant::PpsWithReplacement: {
      const std::int64_t n = design.size.resolve(n_pop);
      const double states = binomial_coeff(n_pop + n - 1, n);
      require(states <= static_cast<double>(kEnumerationLimit), Errc::infeasible,
              "enumeration infeasible: too many count vectors");
      double total = 0.0;
      for (double y : population.responses) {
        require(y > 0.0, Errc::invalid_argument, "PPS requires strictly positive responses");
        total += y;
      }
      std::vector<double> p(static_cast<std::size_t>(n_pop));
      for (std::int64_t k = 0; k < n_pop; ++k)
        p[static_cast<std::size_t>(k)] = population.responses[static_cast<std::size_t>(k)] / total;
      std::vector<std::int32_t> counts(static_cast<std::size_t>(n_pop), 0);
      const double n_fact = factorial(n);
      // Recursive walk over compositions of n into N parts.
      auto rec = [&](auto&& self, std::int64_t k, std::int64_t left) -> void {
        if (k == n_pop - 1) {
          counts[static_cast<std::size_t>(k)] = static_cast<std::int32_t>(left);
          double prob = n_fact;
          for (std::int64_t j = 0; j < n_pop; ++j) {
            const auto c = counts[static_cast<std::size_t>(j)];
            prob *= std::pow(p[static_cast<std::size_t>(j)], c) / factorial(c);
          }
          IndicatorVector ind;
          ind.counts = counts;
          ind.total = n;
          out.push_back({std::move(ind), prob});
          counts[static_cast<std::size_t>(k)] = 0;
          return;
        }
        for (std::int64_t c = 0; c <= left; ++c) {
          counts[static_cast<std::size_t>(k)] = static_cast<std::int32_t>(c);
          self(self, k + 1, left - c);
        }
        counts[static_cast<std::size_t>(k)] = 0;
      };
      rec(rec, 0, n);
      break;
    }
    case DesignVariant::EndogenousStrata: {
      const StrataLayout layout = resolve_strata(design, n_pop);
      const std::vector<std::int64_t> order = order_by_response(population);
      double states = 1.0;
      for (std::size_t h = 0; h < layout.stratum_sizes.size(); ++h)
        states *= binomial_coeff(layout.stratum_sizes[h], layout.sample_sizes[h]);
      require(states <= static_cast<double>(kEnumerationLimit), Errc::infeasible,
              "enumeration infeasible: too many stratified subsets");
      const double prob = 1.0 / states;
      std::vector<std::int32_t> counts(static_cast<std::size_t>(n_pop), 0);
      auto rec = [&](auto&& self, std::size_t h, std::size_t offset) -> void {
        if (h == layout.stratum_sizes.size()) {
          IndicatorVector ind;
          ind.counts = counts;
          ind.total = std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
          out.push_back({std::move(ind), prob});
          return;
        }
        for_each_combination(layout.stratum_sizes[h], layout.sample_sizes[h],
                             [&](const std::vector<std::int64_t>& comb) {
                               for (std::int64_t i : comb)
                                 counts[static_cast<std::size_t>(order[offset + static_cast<std::size_t>(i)])] = 1;
                               self(self, h + 1, offset + static_cast<std::size_t>(layout.stratum_sizes[h]));
                               for (std::int64_t i : comb)
                                 counts[static_cast<std::size_t>(order[offset + static_cast<std::size_t>(i)])] = 0;
                             });
      };
      rec(rec, 0, 0);
      break;
    }
    case DesignVariant::PoissonProportionalZ:
      break;  // unreachable
  }

  double total_prob = 0.0;
  for (const auto& pt : out) total_prob += pt.prob;
  require(std::abs(total_prob - 1.0) <= kProbEps, Errc::runtime,
          "enumeration bug: probabilities do not sum to 1");
  return out;
}

double expected_sample_size(const DesignSpec& design, const Population& population) {
  const std::int64_t n_pop = population.size();
  design.validate_for(n_pop);
  switch (design.variant) {
    case DesignVariant::Srswor:
      return static_cast<double>(design.size.resolve(n_pop));
    case DesignVariant::Bernoulli:
      return static_cast<double>(n_pop) * design.p;
    case DesignVariant::PoissonFixedPi: {
      const std::vector<double> pi = resolved_pi(design, n_pop);
      return std::accumulate(pi.begin(), pi.end(), 0.0);
    }
    case DesignVariant::PoissonProportionalZ:
      // Exact when no inclusion probability is clamped at 1.
      return static_cast<double>(design.n_star.resolve(n_pop));
    case DesignVariant::PoissonPathological:
      return static_cast<double>(n_pop) * 0.5 * (design.a + design.b);
    case DesignVariant::LengthBiasedPoisson: {
      const double t = tau_at(design, n_pop);
      double sum = 0.0;
      for (double y : population.responses) sum += t * y;
      return sum;
    }
    case DesignVariant::ClusterSplit:
      return 0.5 * static_cast<double>(n_pop);
    case DesignVariant::CutOff: {
      std::int64_t below = 0;
      for (double y : population.responses)
        if (y <= design.tau) ++below;
      const std::int64_t s = std::min<std::int64_t>(design.size.resolve(n_pop), n_pop - below);
      return static_cast<double>(std::max<std::int64_t>(s, 0)) +
             (design.mode == CutoffMode::TakeAll ? static_cast<double>(below) : 0.0);
    }
    case DesignVariant::PpsWithReplacement:
      return static_cast<double>(design.size.resolve(n_pop));
    case DesignVariant::EndogenousStrata: {
      const StrataLayout layout = resolve_strata(design, n_pop);
      return static_cast<double>(
          std::accumulate(layout.sample_sizes.begin(), layout.sample_sizes.end(), std::int64_t{0}));
    }
  }
  return 0.0;
}

}  // namespace infsel
