#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "superpop.hpp"

namespace infsel {

enum class DesignVariant {
  Srswor,
  Bernoulli,
  PoissonFixedPi,
  PoissonProportionalZ,
  PoissonPathological,
  LengthBiasedPoisson,
  ClusterSplit,
  CutOff,
  PpsWithReplacement,
  EndogenousStrata,
};

enum class CutoffMode { Cutoff, TakeAll };

// Sample-size rule resolved at sampling time: a fixed count, or floor(rate*N).
struct SizeRule {
  std::optional<std::int64_t> fixed;
  std::optional<double> rate;

  std::int64_t resolve(std::int64_t n_pop) const;
  bool set() const { return fixed.has_value() || rate.has_value(); }
};

// Selection outcome: counts[k] is the number of times element k was drawn
// (0/1 for without-replacement designs).
struct IndicatorVector {
  std::vector<std::int32_t> counts;
  std::int64_t total = 0;

  static IndicatorVector from_counts(std::vector<std::int32_t> c);
  std::int64_t size() const { return static_cast<std::int64_t>(counts.size()); }
  bool empty_sample() const { return total == 0; }
};

struct SampleStats {
  std::int64_t clamped_inclusion_probs = 0;  // PoissonProportionalZ: count of Pi > 1
};

struct DesignSpec {
  DesignVariant variant = DesignVariant::Bernoulli;

  SizeRule size;                      // Srswor n, PpsWithReplacement n, CutOff n
  double p = 0.0;                     // Bernoulli
  std::vector<double> pi_pattern;     // PoissonFixedPi (cycled to length N)
  bool permuted = false;              // PoissonFixedPi
  SizeRule n_star;                    // PoissonProportionalZ
  std::shared_ptr<const SuperpopModel> z_law;  // PoissonProportionalZ
  double a = 0.0, b = 0.0;            // PoissonPathological
  double tau = 0.0;                   // LengthBiasedPoisson rate, or threshold
  double tau_c = 0.0;                 // LengthBiasedPoisson: tau_N = tau*(1 + c/N)
  CutoffMode mode = CutoffMode::Cutoff;
  std::vector<double> stratum_fractions;   // EndogenousStrata, sums to 1
  std::vector<double> sampling_fractions;  // EndogenousStrata, in (0,1]

  // Factories for the common cases used throughout the tests.
  static DesignSpec srswor(std::int64_t n);
  static DesignSpec srswor_rate(double rate);
  static DesignSpec census();
  static DesignSpec bernoulli(double p);
  static DesignSpec poisson_fixed_pi(std::vector<double> pi, bool permuted);
  static DesignSpec poisson_proportional_z(SizeRule n_star, std::shared_ptr<const SuperpopModel> z_law);
  static DesignSpec poisson_pathological(double a, double b);
  static DesignSpec length_biased(double tau, double c = 0.0);
  static DesignSpec cluster_split(double tau);
  static DesignSpec cutoff(double tau, double rate, CutoffMode mode);
  static DesignSpec pps_with_replacement(SizeRule n);
  static DesignSpec endogenous_strata(std::vector<double> stratum_fractions,
                                      std::vector<double> sampling_fractions);

  void validate() const;                      // N-independent invariants
  void validate_for(std::int64_t n_pop) const;  // size-rule feasibility at N

  bool with_replacement() const { return variant == DesignVariant::PpsWithReplacement; }
  // True when the conditional law of the indicators does not depend on the
  // realized responses (the non-informative designs of the taxonomy).
  bool independent_of_y() const;
  bool enumerable() const;
  // False only for the non-permuted fixed-pi design with unequal entries,
  // whose law is attached to element indices.
  bool exchangeable() const;
  std::string tag() const;
};

// Per-stratum layout of the endogenous design at population size N.
struct StrataLayout {
  std::vector<std::int64_t> stratum_sizes;  // N_h, sums to N
  std::vector<std::int64_t> sample_sizes;   // n_h, 1 <= n_h <= N_h
};
StrataLayout resolve_strata(const DesignSpec& design, std::int64_t n_pop);

// One draw from g(. , y); a pure function of (design, population, seed).
IndicatorVector sample(const DesignSpec& design, const Population& population, std::uint64_t seed,
                       SampleStats* stats = nullptr);

struct SupportPoint {
  IndicatorVector indicator;
  double prob;
};

// Exact conditional law g(i, y) on its support. Errors when the support
// exceeds kEnumerationLimit states or the variant has no discrete enumeration
// (PoissonProportionalZ draws continuous inclusion probabilities).
inline constexpr std::int64_t kEnumerationLimit = std::int64_t{1} << 21;
std::vector<SupportPoint> enumerate_support(const DesignSpec& design, const Population& population);

// E[n | Y = y] in closed form. For PoissonProportionalZ this is n* exactly
// whenever no inclusion probability gets clamped at 1.
double expected_sample_size(const DesignSpec& design, const Population& population);

}  // namespace infsel
