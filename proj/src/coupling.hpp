#pragma once

#include <cstdint>
#include <vector>

#include "designs.hpp"
#include "ecdf.hpp"
#include "superpop.hpp"
#include "weights.hpp"

namespace infsel {

// One support point of the embedded draw: the indicator, its discrepancy
// statistic h, and the half-open subinterval of [0,1] it owns. Interval
// lengths are the enumerated probabilities verbatim.
struct CouplingAtom {
  IndicatorVector indicator;
  double h = 0.0;
  double prob = 0.0;
  double cum_lo = 0.0, cum_hi = 0.0;
};

struct CouplingPartition {
  Population population;
  std::vector<CouplingAtom> atoms;  // h non-increasing; intervals tile (0,1]
};

// Discrepancy of a selection against the limit: sup over alpha of
// |normalized selected ecdf - F_s|. With `against_unnormalized` the
// comparison target is G_s instead (the literal display in the embedding
// construction); the two coincide when the normalizer is 1.
double h_gamma(const Population& population, const IndicatorVector& indicator, const LimitCdf& limit,
               bool against_unnormalized = false);

// Enumerates the design's support, ranks it by h (non-increasing, ties broken
// lexicographically on the indicator), and assigns cumulative subintervals.
CouplingPartition build_coupling(const DesignSpec& design, const Population& population,
                                 const LimitCdf& limit, bool against_unnormalized = false);

// x = 0 maps to the first (largest-h) atom; x > 0 to the unique atom whose
// interval (cum_lo, cum_hi] contains x.
const IndicatorVector& coupled_draw(const CouplingPartition& partition, double x);

struct TrajectoryPoint {
  std::int64_t n = 0;
  double h = 0.0;
};

// For one fixed x and a nested population sequence, the trajectory
// N -> h(Y_N, I'(x)) across the grid. Every grid size must be enumerable.
std::vector<TrajectoryPoint> coupled_sup_trajectory(const DesignSpec& design,
                                                    const SuperpopModel& model, const LimitCdf& limit,
                                                    const std::vector<std::int64_t>& n_grid, double x,
                                                    std::uint64_t seed);

}  // namespace infsel
