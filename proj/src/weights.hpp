#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "designs.hpp"
#include "superpop.hpp"

namespace infsel {

// Pointwise weight function y -> m(y) >= 0. The closed forms cover every
// built-in design limit; Custom supports ad-hoc weights in tests and configs.
class Weight {
 public:
  enum class Form { Constant, Linear, Step, Custom };

  static Weight constant(double c);
  // m(y) = slope * y
  static Weight linear(double slope);
  // levels[i] applies on (edges[i-1], edges[i]]; edges strictly increasing,
  // one fewer edge than levels.
  static Weight step(std::vector<double> edges, std::vector<double> levels);
  static Weight custom(std::function<double(double)> fn, std::vector<double> breakpoints = {});

  double eval(double y) const;
  Form form() const { return form_; }
  double constant_value() const { return c_; }
  double slope() const { return c_; }
  const std::vector<double>& step_edges() const { return edges_; }
  const std::vector<double>& step_levels() const { return levels_; }
  // Interior discontinuities/kinks, for breakpoint-aware quadrature.
  std::vector<double> breakpoints() const;

 private:
  Form form_ = Form::Constant;
  double c_ = 1.0;
  std::vector<double> edges_, levels_;
  std::function<double(double)> fn_;
};

// Weight paired with its normalizer under a fixed model (A0's objects:
// m, a dominating constant bound M, and the positive normalizer).
struct WeightSpec {
  Weight m;
  double normalizer = 0.0;  // integral of m f over the support, > 0
  double m_bound = 0.0;     // constant dominating bound on the support
  std::string description;

  static WeightSpec make(Weight m, const SuperpopModel& model, double m_bound,
                         std::string description);
};

// The limit c.d.f. F_s(alpha) = int 1_{(-inf,alpha]} m f / int m f, with a
// cached piecewise representation. Closed forms are used for constant
// weights and for uniform-model linear/step weights; everything else goes
// through breakpoint-aware adaptive Simpson (abs tol 1e-9 or better).
class LimitCdf {
 public:
  LimitCdf(WeightSpec weight, SuperpopModel model);

  double eval(double alpha) const;           // F_s
  double unnormalized(double alpha) const;   // G_s(alpha) = int 1 m f
  double normalizer() const { return normalizer_; }
  // inf{y : F_s(y) >= p}, bisection to 1e-10. Errors if a flat region of
  // F_s is detected at level p (Corollary-1 hypothesis violated).
  double quantile(double p) const;

  double support_lo() const { return model_.support_lo(); }
  double support_hi() const { return model_.support_hi(); }
  const WeightSpec& weight() const { return weight_; }
  const SuperpopModel& model() const { return model_; }

 private:
  enum class Path { ConstantWeight, UniformLinear, UniformStep, Numeric };

  double integrand(double y) const { return weight_.m.eval(y) * model_.density(y); }

  WeightSpec weight_;
  SuperpopModel model_;
  Path path_ = Path::Numeric;
  double normalizer_ = 0.0;
  std::vector<double> nodes_;  // numeric/step cache
  std::vector<double> cum_;    // unnormalized cumulative at nodes
};

// Monte Carlo estimates of Definition-2 functionals with standard errors.
// c_hat is the plug-in covariance, so d_hat = c_hat + mprime_12 * mprime_21
// holds identically.
struct InclusionEstimates {
  double m_hat = 0, v_hat = 0;
  double mprime_12 = 0, mprime_21 = 0, c_hat = 0, d_hat = 0;
  double se_m = 0, se_v = 0, se_mprime_12 = 0, se_mprime_21 = 0, se_c = 0, se_d = 0;
  std::int64_t reps = 0;

  std::string to_json() const;
};

// Fixes Y_1 = y, draws Y_2..Y_N i.i.d. from the model, runs the design, and
// averages the count of element 1 over `reps` replicates.
InclusionEstimates m_monte_carlo(const DesignSpec& design, const SuperpopModel& model, double y,
                                 std::int64_t n_pop, std::int64_t reps, std::uint64_t seed);

// Fixes Y_1 = y1, Y_2 = y2, draws the rest, and estimates both pairwise
// expectations, the product moment and the conditional covariance.
InclusionEstimates pairwise_monte_carlo(const DesignSpec& design, const SuperpopModel& model,
                                        double y1, double y2, std::int64_t n_pop, std::int64_t reps,
                                        std::uint64_t seed);

struct TheoreticalM {
  double value = 0.0;
  bool is_limit = false;  // true when only the large-N limit has a closed form
};

// Closed-form first-order inclusion probability where available: exact at
// finite N for SRSWOR, Bernoulli and length-biased designs; large-N limits
// for cut-off, PPS and endogenous stratification. nullopt otherwise.
std::optional<TheoreticalM> m_theoretical(const DesignSpec& design, const SuperpopModel& model,
                                          double y, std::int64_t n_pop);

// The limit weight of Definition 3 for designs that have one. Throws
// Errc::no_limit for the cluster and pathological-Poisson designs (their
// A-conditions fail) and when the weight would have a zero normalizer.
WeightSpec builtin_weight(const DesignSpec& design, const SuperpopModel& model);

// Sample p.d.f. via Bayes' rule: f_s(y) = m(y) f(y) / int m f.
double sample_pdf(const WeightSpec& m_gamma, const SuperpopModel& model, double y);

}  // namespace infsel
