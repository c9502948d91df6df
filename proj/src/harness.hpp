#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "conditions.hpp"
#include "config.hpp"

namespace infsel {

struct ConvergenceRow {
  std::int64_t n = 0;
  std::int64_t replicate = 0;
  std::int64_t realized_n = 0;
  bool empty = false;
  double sup_dist = 0.0;
  double sup_dist_sq = 0.0;
  double quantile_sup_dist = 0.0;  // NaN on empty-sample rows
};

struct ConvergenceAggregate {
  std::int64_t n = 0;
  double mean_sup = 0.0, se_sup = 0.0;
  double mean_sup_sq = 0.0, se_sup_sq = 0.0;
  double mean_quantile_sup = 0.0, se_quantile_sup = 0.0;  // over non-empty rows
  std::int64_t empty_count = 0;
  double empty_rate = 0.0;
  double pn0_bound = 0.0;  // Chebyshev bound from realized sample sizes
  bool pn0_valid = false;
};

struct ConvergenceReport {
  std::string design_tag;
  std::vector<std::int64_t> n_grid;
  std::int64_t replicates = 0;
  std::uint64_t seed = 0;
  std::vector<ConvergenceRow> rows;  // ordered by (grid index, replicate)
  std::vector<ConvergenceAggregate> aggregates;
  double decay_slope = 0.0;  // least squares on (log N, log mean sup^2)
  double decay_r2 = 0.0;
  bool slope_valid = false;

  // Fixed column order: design,N,replicate,realized_n,empty,sup_dist,
  // sup_dist_sq,quantile_sup_dist. Doubles print with %.17g (round-trip).
  std::string to_csv() const;
  std::string summary_json() const;
};

// Per-replicate seed: mix64(mix64(mix64(seed, grid_index), replicate), k)
// where k tags the population (1) and design (2) streams. Parallel execution
// over replicates merges by (grid index, replicate), so the report is
// byte-identical across thread counts.
ConvergenceReport run_convergence(const ExperimentConfig& config);

// Dispatches the applicable checkers: A4 for the non-informative
// without-replacement designs, A3 plus the A0/A1 integrals plus A2 for
// informative without-replacement designs, A0/A1/A2 for with-replacement.
ConditionReport run_audit(const ExperimentConfig& config);

// CSV dump of the exact design law on a drawn population: columns
// indicator,probability (bitstring for 0/1 designs, '-'-joined counts
// otherwise).
std::string run_enumerate_csv(const ExperimentConfig& config);

// CSV dump of the embedding partition: indicator,h,interval_lo,interval_hi.
std::string run_couple_csv(const ExperimentConfig& config);

// Runs the configured mode, writes config.output when set, and returns the
// mode's summary (JSON for converge/audit, a small JSON stub for the dumps).
std::string run_and_write(const ExperimentConfig& config);

}  // namespace infsel
