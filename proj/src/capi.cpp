#include "infsel/infsel.h"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "config.hpp"
#include "conditions.hpp"
#include "coupling.hpp"
#include "ecdf.hpp"
#include "error.hpp"
#include "harness.hpp"
#include "weights.hpp"

using namespace infsel;

// Opaque handle definitions: thin owning wrappers over the core value types.
struct infsel_model {
  std::shared_ptr<const SuperpopModel> value;
};
struct infsel_design {
  DesignSpec value;
};
struct infsel_population {
  Population value;
};
struct infsel_indicator {
  IndicatorVector value;
};
struct infsel_step_cdf {
  StepCdf value;
};
struct infsel_limit_cdf {
  std::shared_ptr<const LimitCdf> value;
};
struct infsel_coupling {
  CouplingPartition value;
};

namespace {

thread_local std::string g_last_error;

infsel_status status_of(Errc code) {
  switch (code) {
    case Errc::invalid_argument:
      return INFSEL_ERR_INVALID_ARGUMENT;
    case Errc::config:
      return INFSEL_ERR_CONFIG;
    case Errc::unsupported:
      return INFSEL_ERR_UNSUPPORTED;
    case Errc::infeasible:
      return INFSEL_ERR_INFEASIBLE;
    case Errc::no_limit:
      return INFSEL_ERR_NO_LIMIT;
    case Errc::runtime:
      return INFSEL_ERR_RUNTIME;
    case Errc::io:
      return INFSEL_ERR_IO;
  }
  return INFSEL_ERR_RUNTIME;
}

template <class Fn>
infsel_status guarded(Fn&& fn) {
  try {
    fn();
    return INFSEL_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return INFSEL_ERR_RUNTIME;
  } catch (...) {
    g_last_error = "unknown error";
    return INFSEL_ERR_RUNTIME;
  }
}

infsel_status bad_argument(const char* msg) {
  g_last_error = msg;
  return INFSEL_ERR_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* infsel_version(void) { return "1.0.0"; }

const char* infsel_last_error(void) { return g_last_error.c_str(); }

void infsel_string_free(char* s) { delete[] s; }

infsel_status infsel_model_create_json(const char* json_spec, infsel_model** out) {
  if (!json_spec || !out) return bad_argument("null argument");
  return guarded([&] { *out = new infsel_model{parse_model_json(json_spec)}; });
}

void infsel_model_free(infsel_model* model) { delete model; }

infsel_status infsel_model_density(const infsel_model* model, double y, double* out) {
  if (!model || !out) return bad_argument("null argument");
  return guarded([&] { *out = model->value->density(y); });
}

infsel_status infsel_model_cdf(const infsel_model* model, double alpha, double* out) {
  if (!model || !out) return bad_argument("null argument");
  return guarded([&] { *out = model->value->cdf(alpha); });
}

infsel_status infsel_model_quantile(const infsel_model* model, double u, double* out) {
  if (!model || !out) return bad_argument("null argument");
  return guarded([&] { *out = model->value->quantile(u); });
}

infsel_status infsel_model_moment(const infsel_model* model, int k, double* out) {
  if (!model || !out) return bad_argument("null argument");
  return guarded([&] { *out = model->value->moment(k); });
}

infsel_status infsel_model_support(const infsel_model* model, double* lo, double* hi) {
  if (!model || !lo || !hi) return bad_argument("null argument");
  *lo = model->value->support_lo();
  *hi = model->value->support_hi();
  return INFSEL_OK;
}

infsel_status infsel_population_draw(const infsel_model* model, int64_t n, uint64_t seed,
                                     infsel_population** out) {
  if (!model || !out) return bad_argument("null argument");
  return guarded([&] { *out = new infsel_population{draw_population(*model->value, n, seed)}; });
}

infsel_status infsel_population_create(const double* values, int64_t n, infsel_population** out) {
  if (!values || !out || n < 1) return bad_argument("null argument or empty population");
  Population pop;
  pop.responses.assign(values, values + n);
  *out = new infsel_population{std::move(pop)};
  return INFSEL_OK;
}

void infsel_population_free(infsel_population* population) { delete population; }

infsel_status infsel_population_size(const infsel_population* population, int64_t* out) {
  if (!population || !out) return bad_argument("null argument");
  *out = population->value.size();
  return INFSEL_OK;
}

infsel_status infsel_population_values(const infsel_population* population, const double** data,
                                       int64_t* len) {
  if (!population || !data || !len) return bad_argument("null argument");
  *data = population->value.responses.data();
  *len = population->value.size();
  return INFSEL_OK;
}

infsel_status infsel_design_create_json(const char* json_spec, infsel_design** out) {
  if (!json_spec || !out) return bad_argument("null argument");
  return guarded([&] { *out = new infsel_design{parse_design_json(json_spec)}; });
}

void infsel_design_free(infsel_design* design) { delete design; }

infsel_status infsel_design_sample(const infsel_design* design, const infsel_population* population,
                                   uint64_t seed, infsel_indicator** out) {
  if (!design || !population || !out) return bad_argument("null argument");
  return guarded(
      [&] { *out = new infsel_indicator{sample(design->value, population->value, seed)}; });
}

infsel_status infsel_design_expected_sample_size(const infsel_design* design,
                                                 const infsel_population* population, double* out) {
  if (!design || !population || !out) return bad_argument("null argument");
  return guarded([&] { *out = expected_sample_size(design->value, population->value); });
}

infsel_status infsel_design_enumerate_csv(const infsel_design* design,
                                          const infsel_population* population, char** out_csv) {
  if (!design || !population || !out_csv) return bad_argument("null argument");
  return guarded([&] {
    const auto support = enumerate_support(design->value, population->value);
    std::ostringstream os;
    os << "indicator,probability\n";
    const bool binary = !design->value.with_replacement();
    for (const auto& pt : support) {
      if (binary) {
        for (auto c : pt.indicator.counts) os << (c ? '1' : '0');
      } else {
        for (std::size_t k = 0; k < pt.indicator.counts.size(); ++k) {
          if (k) os << '-';
          os << pt.indicator.counts[k];
        }
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", pt.prob);
      os << ',' << buf << '\n';
    }
    *out_csv = dup_string(os.str());
  });
}

void infsel_indicator_free(infsel_indicator* indicator) { delete indicator; }

infsel_status infsel_indicator_counts(const infsel_indicator* indicator, const int32_t** data,
                                      int64_t* len) {
  if (!indicator || !data || !len) return bad_argument("null argument");
  *data = indicator->value.counts.data();
  *len = indicator->value.size();
  return INFSEL_OK;
}

infsel_status infsel_indicator_total(const infsel_indicator* indicator, int64_t* out) {
  if (!indicator || !out) return bad_argument("null argument");
  *out = indicator->value.total;
  return INFSEL_OK;
}

infsel_status infsel_m_theoretical(const infsel_design* design, const infsel_model* model, double y,
                                   int64_t n_pop, double* value, int* is_limit) {
  if (!design || !model || !value || !is_limit) return bad_argument("null argument");
  return guarded([&] {
    const auto mt = m_theoretical(design->value, *model->value, y, n_pop);
    require(mt.has_value(), Errc::unsupported,
            "no closed-form inclusion probability for this design variant");
    *value = mt->value;
    *is_limit = mt->is_limit ? 1 : 0;
  });
}

infsel_status infsel_m_monte_carlo_json(const infsel_design* design, const infsel_model* model,
                                        double y, int64_t n_pop, int64_t reps, uint64_t seed,
                                        char** out_json) {
  if (!design || !model || !out_json) return bad_argument("null argument");
  return guarded([&] {
    *out_json =
        dup_string(m_monte_carlo(design->value, *model->value, y, n_pop, reps, seed).to_json());
  });
}

infsel_status infsel_pairwise_monte_carlo_json(const infsel_design* design,
                                               const infsel_model* model, double y1, double y2,
                                               int64_t n_pop, int64_t reps, uint64_t seed,
                                               char** out_json) {
  if (!design || !model || !out_json) return bad_argument("null argument");
  return guarded([&] {
    *out_json = dup_string(
        pairwise_monte_carlo(design->value, *model->value, y1, y2, n_pop, reps, seed).to_json());
  });
}

infsel_status infsel_ecdf_build(const infsel_population* population,
                                const infsel_indicator* indicator, infsel_step_cdf** out) {
  if (!population || !indicator || !out) return bad_argument("null argument");
  return guarded(
      [&] { *out = new infsel_step_cdf{empirical_cdf(population->value, indicator->value)}; });
}

void infsel_step_cdf_free(infsel_step_cdf* step) { delete step; }

infsel_status infsel_ecdf_eval(const infsel_step_cdf* step, double alpha, double* out) {
  if (!step || !out) return bad_argument("null argument");
  *out = step->value.eval(alpha);
  return INFSEL_OK;
}

infsel_status infsel_ecdf_is_empty(const infsel_step_cdf* step, int* out) {
  if (!step || !out) return bad_argument("null argument");
  *out = step->value.empty ? 1 : 0;
  return INFSEL_OK;
}

infsel_status infsel_ecdf_quantile(const infsel_step_cdf* step, double p, double* out) {
  if (!step || !out) return bad_argument("null argument");
  return guarded([&] { *out = quantile(step->value, p); });
}

infsel_status infsel_limit_cdf_builtin(const infsel_design* design, const infsel_model* model,
                                       infsel_limit_cdf** out) {
  if (!design || !model || !out) return bad_argument("null argument");
  return guarded([&] {
    *out = new infsel_limit_cdf{std::make_shared<const LimitCdf>(
        builtin_weight(design->value, *model->value), *model->value)};
  });
}

void infsel_limit_cdf_free(infsel_limit_cdf* limit) { delete limit; }

infsel_status infsel_limit_cdf_eval(const infsel_limit_cdf* limit, double alpha, double* out) {
  if (!limit || !out) return bad_argument("null argument");
  return guarded([&] { *out = limit->value->eval(alpha); });
}

infsel_status infsel_limit_quantile(const infsel_limit_cdf* limit, double p, double* out) {
  if (!limit || !out) return bad_argument("null argument");
  return guarded([&] { *out = limit->value->quantile(p); });
}

infsel_status infsel_sup_distance_to_limit(const infsel_step_cdf* step,
                                           const infsel_limit_cdf* limit, double* out) {
  if (!step || !limit || !out) return bad_argument("null argument");
  return guarded([&] { *out = sup_distance(step->value, *limit->value); });
}

infsel_status infsel_sup_distance_to_model(const infsel_step_cdf* step, const infsel_model* model,
                                           double* out) {
  if (!step || !model || !out) return bad_argument("null argument");
  return guarded([&] { *out = sup_distance(step->value, *model->value); });
}

infsel_status infsel_quantile_sup_distance(const infsel_step_cdf* step,
                                           const infsel_limit_cdf* limit, double k_lo, double k_hi,
                                           int grid, double* out) {
  if (!step || !limit || !out) return bad_argument("null argument");
  return guarded(
      [&] { *out = quantile_sup_distance(step->value, *limit->value, k_lo, k_hi, grid); });
}

infsel_status infsel_coupling_build(const infsel_design* design,
                                    const infsel_population* population,
                                    const infsel_limit_cdf* limit, infsel_coupling** out) {
  if (!design || !population || !limit || !out) return bad_argument("null argument");
  return guarded([&] {
    *out = new infsel_coupling{build_coupling(design->value, population->value, *limit->value)};
  });
}

void infsel_coupling_free(infsel_coupling* coupling) { delete coupling; }

infsel_status infsel_coupling_size(const infsel_coupling* coupling, int64_t* out) {
  if (!coupling || !out) return bad_argument("null argument");
  *out = static_cast<int64_t>(coupling->value.atoms.size());
  return INFSEL_OK;
}

infsel_status infsel_coupling_draw(const infsel_coupling* coupling, double x,
                                   infsel_indicator** out) {
  if (!coupling || !out) return bad_argument("null argument");
  return guarded([&] { *out = new infsel_indicator{coupled_draw(coupling->value, x)}; });
}

infsel_status infsel_coupling_csv(const infsel_coupling* coupling, char** out_csv) {
  if (!coupling || !out_csv) return bad_argument("null argument");
  return guarded([&] {
    std::ostringstream os;
    os << "indicator,h,interval_lo,interval_hi\n";
    for (const auto& atom : coupling->value.atoms) {
      bool binary = true;
      for (auto c : atom.indicator.counts)
        if (c > 1) binary = false;
      if (binary) {
        for (auto c : atom.indicator.counts) os << (c ? '1' : '0');
      } else {
        for (std::size_t k = 0; k < atom.indicator.counts.size(); ++k) {
          if (k) os << '-';
          os << atom.indicator.counts[k];
        }
      }
      char buf[128];
      std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%.17g\n", atom.h, atom.cum_lo, atom.cum_hi);
      os << buf;
    }
    *out_csv = dup_string(os.str());
  });
}

infsel_status infsel_h_gamma(const infsel_population* population,
                             const infsel_indicator* indicator, const infsel_limit_cdf* limit,
                             double* out) {
  if (!population || !indicator || !limit || !out) return bad_argument("null argument");
  return guarded(
      [&] { *out = h_gamma(population->value, indicator->value, *limit->value); });
}

infsel_status infsel_empty_sample_bound(double expected_n, double var_n, double* out) {
  if (!out) return bad_argument("null argument");
  return guarded([&] { *out = empty_sample_bound(expected_n, var_n); });
}

infsel_status infsel_srswor_cov_identity(int64_t n_pop, int64_t n, double* closed_form,
                                         double* enumerated) {
  if (!closed_form || !enumerated) return bad_argument("null argument");
  return guarded([&] {
    const auto [closed, enumd] = srswor_cov_identity(n_pop, n);
    *closed_form = closed;
    *enumerated = enumd;
  });
}

static infsel_status run_config_impl(const std::string& text, const char* mode_override,
                                     const char* output_override, int has_seed_override,
                                     uint64_t seed_override, int threads,
                                     char** out_summary_json) {
  return guarded([&] {
    ExperimentConfig cfg = parse_config(text);
    if (mode_override && *mode_override) cfg.mode = mode_override;
    if (output_override && *output_override) cfg.output = output_override;
    if (has_seed_override) cfg.seed = seed_override;
    if (threads > 0) cfg.threads = threads;
    require(cfg.mode == "converge" || cfg.mode == "audit" || cfg.mode == "couple" ||
                cfg.mode == "enumerate",
            Errc::config, "mode must be converge | audit | couple | enumerate");
    const std::string summary = run_and_write(cfg);
    if (out_summary_json) *out_summary_json = dup_string(summary);
  });
}

infsel_status infsel_run_config_json(const char* config_json, const char* mode_override,
                                     const char* output_override, int has_seed_override,
                                     uint64_t seed_override, int threads,
                                     char** out_summary_json) {
  if (!config_json) return bad_argument("null config");
  return run_config_impl(config_json, mode_override, output_override, has_seed_override,
                         seed_override, threads, out_summary_json);
}

infsel_status infsel_run_config_file(const char* path, const char* mode_override,
                                     const char* output_override, int has_seed_override,
                                     uint64_t seed_override, int threads,
                                     char** out_summary_json) {
  if (!path) return bad_argument("null path");
  std::ifstream is(path, std::ios::binary);
  if (!is.good()) {
    g_last_error = std::string("cannot open config file: ") + path;
    return INFSEL_ERR_IO;
  }
  std::ostringstream buf;
  buf << is.rdbuf();
  return run_config_impl(buf.str(), mode_override, output_override, has_seed_override,
                         seed_override, threads, out_summary_json);
}

}  // extern "C"
