#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "designs.hpp"
#include "superpop.hpp"
#include "weights.hpp"

namespace infsel {

enum class Verdict { Pass, Fail, Inconclusive };
const char* to_string(Verdict v);

// One assumption's trace across the size grid plus its verdict.
struct ConditionEntry {
  std::string id;                    // A0.1, A0.2, A1.1, ..., A4
  std::vector<std::int64_t> n_grid;
  std::vector<double> estimates;     // primary per-N statistic
  std::vector<double> ses;           // standard errors (0 for exact values)
  std::vector<double> aux;           // optional secondary series
  std::string aux_name;
  double slope = 0.0;                // fitted log-log decay exponent
  bool slope_valid = false;
  Verdict verdict = Verdict::Inconclusive;
  std::string note;
};

struct ConditionReport {
  std::string design_tag;
  std::string model_tag;
  std::uint64_t seed = 0;
  std::vector<ConditionEntry> entries;
};

std::string to_json(const ConditionReport& report);

// Vanishing-sequence operationalization: a sequence passes when the fitted
// log-log slope is below slope_threshold and the final estimate is below
// max(final_threshold, se_factor * final SE); a sequence whose every value is
// already below all_small_threshold also passes (boundary-rate cases); a
// sequence that is noise-dominated everywhere passes only if that noise is
// itself small, otherwise it is inconclusive.
struct VerdictPolicy {
  double slope_threshold = -0.5;
  double final_threshold = 0.02;
  double all_small_threshold = 0.01;
  double se_factor = 4.0;
  double stabilize_rel_tol = 0.05;  // relative spread over the top half of the grid
  double nonzero_floor = 1e-3;
};

struct PowerFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  bool valid = false;
};
// Least squares on (log n, log v) over the strictly positive values.
PowerFit fit_power_law(const std::vector<std::int64_t>& n, const std::vector<double>& v);

ConditionEntry judge_vanishing(std::string id, std::vector<std::int64_t> n_grid,
                               std::vector<double> estimates, std::vector<double> ses,
                               const VerdictPolicy& policy = {});
// Passes when the top half of the grid has relative spread below tolerance
// and the final value is significantly nonzero.
ConditionEntry judge_stabilizes_nonzero(std::string id, std::vector<std::int64_t> n_grid,
                                        std::vector<double> estimates, std::vector<double> ses,
                                        const VerdictPolicy& policy = {});

// Monte Carlo budgets for the checkers.
struct CheckBudget {
  std::int64_t reps = 400;             // (population, sample) replicates per N
  std::int64_t pointwise_reps = 12000; // conditioned Monte Carlo replicates per point
  std::int64_t pair_draws = 32;        // (y1,y2) ~ f x f draws for the A1 integrals
  std::int64_t inner_reps = 200;       // pairwise replicates per integrand evaluation
  std::int64_t empty_reps = 2000;      // replicates for P(I = 0)
};

// A4: E[n]/N stabilizes to a nonzero value and Var(n)/N^2 vanishes.
// Requires a without-replacement design with indicators independent of the
// responses; the checker also flags a significant corr(n, mean Y) in the note.
ConditionEntry check_A4(const DesignSpec& design, const SuperpopModel& model,
                        const std::vector<std::int64_t>& n_grid, std::int64_t reps,
                        std::uint64_t seed, const VerdictPolicy& policy = {});

// A3.2/A3.3/A3.4/A3.5 for without-replacement designs at the given test pairs.
std::vector<ConditionEntry> check_A3(const DesignSpec& design, const SuperpopModel& model,
                                     const std::vector<std::pair<double, double>>& y_pairs,
                                     const std::vector<std::int64_t>& n_grid,
                                     const CheckBudget& budget, std::uint64_t seed,
                                     const VerdictPolicy& policy = {});

// A0.1/A0.2 and the A1 integral conditions by Monte Carlo over f x f pairs,
// with split-replicate debiasing of the product terms.
std::vector<ConditionEntry> check_A1_integrals(const DesignSpec& design, const SuperpopModel& model,
                                               const std::vector<std::int64_t>& n_grid,
                                               const CheckBudget& budget, std::uint64_t seed,
                                               const VerdictPolicy& policy = {});

// A2.1/A2.2/A2.3 on one nested population sequence (prefix property), which
// satisfies A2's hypothesis almost surely; the universal quantifier over
// sequences is not testable and this is the documented stand-in.
std::vector<ConditionEntry> check_A2(const DesignSpec& design, const SuperpopModel& model,
                                     const std::vector<double>& alpha_grid,
                                     const std::vector<std::int64_t>& n_grid,
                                     const CheckBudget& budget, std::uint64_t seed,
                                     const VerdictPolicy& policy = {});

// Chebyshev bound P(n = 0) <= Var(n) / (E[n] - 1)^2; requires E[n] > 1.
double empty_sample_bound(double expected_n, double var_n);

// SRSWOR covariance identity: (closed form, exhaustive enumeration) of
// Cov(I_1, I_2) for fixed-size SRSWOR; the two agree to 1e-12.
std::pair<double, double> srswor_cov_identity(std::int64_t n_pop, std::int64_t n);

// Best closed-form m available to the checkers: the public table first, then
// internal formulas for the remaining variants (cluster 1/2, pathological
// (a+b)/2, fixed-pi mean, proportional-Z n*/N ignoring clamping).
std::optional<double> m_internal(const DesignSpec& design, const SuperpopModel& model, double y,
                                 std::int64_t n_pop);

// Exact g(0, y) where the design admits it; Monte Carlo over Z otherwise.
double empty_probability_given_y(const DesignSpec& design, const Population& population,
                                 std::uint64_t seed);

}  // namespace infsel
