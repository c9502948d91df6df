#include "coupling.hpp"

#include <algorithm>

#include "error.hpp"
#include "rng.hpp"

namespace infsel {

double h_gamma(const Population& population, const IndicatorVector& indicator, const LimitCdf& limit,
               bool against_unnormalized) {
  const StepCdf step = empirical_cdf(population, indicator);
  return against_unnormalized ? sup_distance_unnormalized(step, limit) : sup_distance(step, limit);
}

CouplingPartition build_coupling(const DesignSpec& design, const Population& population,
                                 const LimitCdf& limit, bool against_unnormalized) {
  std::vector<SupportPoint> support = enumerate_support(design, population);
  CouplingPartition part;
  part.population = population;
  part.atoms.reserve(support.size());
  for (auto& pt : support) {
    CouplingAtom atom;
    atom.h = h_gamma(population, pt.indicator, limit, against_unnormalized);
    atom.prob = pt.prob;
    atom.indicator = std::move(pt.indicator);
    part.atoms.push_back(std::move(atom));
  }
  std::sort(part.atoms.begin(), part.atoms.end(), [](const CouplingAtom& x, const CouplingAtom& y) {
    if (x.h != y.h) return x.h > y.h;
    return x.indicator.counts < y.indicator.counts;  // deterministic tie-break
  });
  double cum = 0.0;
  for (auto& atom : part.atoms) {
    atom.cum_lo = cum;
    cum += atom.prob;
    atom.cum_hi = cum;
  }
  part.atoms.back().cum_hi = 1.0;  // absorb cumulative roundoff at the far end
  return part;
}

const IndicatorVector& coupled_draw(const CouplingPartition& partition, double x) {
  require(x >= 0.0 && x <= 1.0, Errc::invalid_argument, "coupled draw point must lie in [0,1]");
  require(!partition.atoms.empty(), Errc::invalid_argument, "empty coupling partition");
  if (x == 0.0) return partition.atoms.front().indicator;
  const auto it = std::lower_bound(partition.atoms.begin(), partition.atoms.end(), x,
                                   [](const CouplingAtom& atom, double v) { return atom.cum_hi < v; });
  return (it == partition.atoms.end() ? partition.atoms.back() : *it).indicator;
}

std::vector<TrajectoryPoint> coupled_sup_trajectory(const DesignSpec& design,
                                                    const SuperpopModel& model, const LimitCdf& limit,
                                                    const std::vector<std::int64_t>& n_grid, double x,
                                                    std::uint64_t seed) {
  require(!n_grid.empty(), Errc::invalid_argument, "empty size grid");
  require(x >= 0.0 && x <= 1.0, Errc::invalid_argument, "coupled draw point must lie in [0,1]");
  const std::int64_t n_max = *std::max_element(n_grid.begin(), n_grid.end());
  const Population full = draw_population(model, n_max, mix64(seed, 0x706F70ULL));

  std::vector<TrajectoryPoint> out;
  out.reserve(n_grid.size());
  for (std::int64_t n : n_grid) {
    Population prefix;
    prefix.responses.assign(full.responses.begin(),
                            full.responses.begin() + static_cast<std::ptrdiff_t>(n));
    const CouplingPartition part = build_coupling(design, prefix, limit);
    const IndicatorVector& drawn = coupled_draw(part, x);
    out.push_back({n, h_gamma(prefix, drawn, limit)});
  }
  return out;
}

}  // namespace infsel
