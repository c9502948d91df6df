#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace infsel {

enum class ModelKind { Uniform, TruncatedExponential, PiecewiseLinear };

// A realized finite population: the ordered response vector.
struct Population {
  std::vector<double> responses;

  std::int64_t size() const { return static_cast<std::int64_t>(responses.size()); }
};

// Superpopulation model: a density f with compact support [lo, hi],
// 0 <= lo < hi, with exact c.d.f., inverse c.d.f. and moments up to order 6.
// Immutable after construction; safe to share across threads.
class SuperpopModel {
 public:
  static SuperpopModel uniform(double a, double b);
  static SuperpopModel truncated_exponential(double rate, double a, double b);
  // Knots are (y, density) pairs; the density is linearly interpolated and
  // rescaled at construction so it integrates to one.
  static SuperpopModel piecewise_linear(std::vector<std::pair<double, double>> knots);

  double density(double y) const;
  // F(alpha) = integral of f over (-inf, alpha]; exact closed form per kind.
  double cdf(double alpha) const;
  // Inverse c.d.f. with inf semantics: smallest y with F(y) >= u, u in [0,1].
  double quantile(double u) const;
  // E[Y^k] for 1 <= k <= 6: closed form except PiecewiseLinear (quadrature).
  double moment(int k) const;

  double support_lo() const { return lo_; }
  double support_hi() const { return hi_; }
  ModelKind kind() const { return kind_; }
  std::string tag() const;
  // Interior points where the density is non-smooth (piecewise-linear knots).
  std::vector<double> breakpoints() const;

 private:
  SuperpopModel() = default;
  void validate() const;

  ModelKind kind_ = ModelKind::Uniform;
  double lo_ = 0.0, hi_ = 1.0;
  double rate_ = 0.0;                        // TruncatedExponential
  std::vector<double> knot_y_, knot_f_;      // PiecewiseLinear (normalized)
  std::vector<double> knot_cum_;             // c.d.f. at knots
};

// N i.i.d. draws via the inverse-c.d.f. transform of a SplitMix64 stream;
// identical (model, n, seed) gives identical output.
Population draw_population(const SuperpopModel& model, std::int64_t n, std::uint64_t seed);

}  // namespace infsel
