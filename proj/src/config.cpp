#include "config.hpp"

#include <json.hpp>

#include "error.hpp"

namespace infsel {

namespace {

using nlohmann::json;

json parse_json_text(const std::string& text, const char* what) {
  json j = json::parse(text, nullptr, false);
  require(!j.is_discarded(), Errc::config, std::string("invalid JSON for ") + what);
  return j;
}

double get_number(const json& j, const char* key) {
  require(j.contains(key) && j[key].is_number(), Errc::config,
          std::string("missing or non-numeric key: ") + key);
  return j[key].get<double>();
}

std::shared_ptr<const SuperpopModel> model_from_json(const json& j) {
  require(j.is_object() && j.contains("kind") && j["kind"].is_string(), Errc::config,
          "model: object with a \"kind\" string required");
  const std::string kind = j["kind"].get<std::string>();
  try {
    if (kind == "uniform")
      return std::make_shared<SuperpopModel>(
          SuperpopModel::uniform(get_number(j, "a"), get_number(j, "b")));
    if (kind == "truncated_exponential")
      return std::make_shared<SuperpopModel>(SuperpopModel::truncated_exponential(
          get_number(j, "rate"), get_number(j, "a"), get_number(j, "b")));
    if (kind == "piecewise_linear") {
      require(j.contains("knots") && j["knots"].is_array(), Errc::config,
              "piecewise_linear: \"knots\" array required");
      std::vector<std::pair<double, double>> knots;
      for (const auto& k : j["knots"]) {
        require(k.is_array() && k.size() == 2, Errc::config, "knots must be [y, f] pairs");
        knots.emplace_back(k[0].get<double>(), k[1].get<double>());
      }
      return std::make_shared<SuperpopModel>(SuperpopModel::piecewise_linear(std::move(knots)));
    }
  } catch (const Error& e) {
    fail(Errc::config, std::string("model: ") + e.what());
  }
  fail(Errc::config, "unknown model kind: " + kind);
}

SizeRule size_rule_from(const json& j, const char* fixed_key, const char* rate_key) {
  SizeRule rule;
  if (j.contains(fixed_key)) rule.fixed = j[fixed_key].get<std::int64_t>();
  if (j.contains(rate_key)) rule.rate = j[rate_key].get<double>();
  return rule;
}

DesignSpec design_from_json(const json& j) {
  require(j.is_object() && j.contains("variant") && j["variant"].is_string(), Errc::config,
          "design: object with a \"variant\" string required");
  const std::string variant = j["variant"].get<std::string>();
  try {
    if (variant == "srswor") {
      DesignSpec d;
      d.variant = DesignVariant::Srswor;
      d.size = size_rule_from(j, "n", "rate");
      d.validate();
      return d;
    }
    if (variant == "census") return DesignSpec::census();
    if (variant == "bernoulli") return DesignSpec::bernoulli(get_number(j, "p"));
    if (variant == "poisson_fixed_pi") {
      require(j.contains("pi") && j["pi"].is_array(), Errc::config, "poisson_fixed_pi: \"pi\" array");
      std::vector<double> pi = j["pi"].get<std::vector<double>>();
      return DesignSpec::poisson_fixed_pi(std::move(pi), j.value("permuted", false));
    }
    if (variant == "poisson_proportional_z") {
      require(j.contains("z_law"), Errc::config, "poisson_proportional_z: \"z_law\" model required");
      return DesignSpec::poisson_proportional_z(size_rule_from(j, "n_star", "rate"),
                                                model_from_json(j["z_law"]));
    }
    if (variant == "poisson_pathological")
      return DesignSpec::poisson_pathological(get_number(j, "a"), get_number(j, "b"));
    if (variant == "length_biased")
      return DesignSpec::length_biased(get_number(j, "tau"), j.value("c", 0.0));
    if (variant == "cluster_split") return DesignSpec::cluster_split(get_number(j, "tau"));
    if (variant == "cutoff") {
      const std::string mode = j.value("mode", "cutoff");
      require(mode == "cutoff" || mode == "take_all", Errc::config,
              "cutoff: mode must be \"cutoff\" or \"take_all\"");
      return DesignSpec::cutoff(get_number(j, "tau"), get_number(j, "rate"),
                                mode == "take_all" ? CutoffMode::TakeAll : CutoffMode::Cutoff);
    }
    if (variant == "pps_with_replacement")
      return DesignSpec::pps_with_replacement(size_rule_from(j, "n", "rate"));
    if (variant == "endogenous_strata") {
      require(j.contains("stratum_fractions") && j.contains("sampling_fractions"), Errc::config,
              "endogenous_strata: stratum_fractions and sampling_fractions required");
      return DesignSpec::endogenous_strata(j["stratum_fractions"].get<std::vector<double>>(),
                                           j["sampling_fractions"].get<std::vector<double>>());
    }
  } catch (const Error& e) {
    if (e.code() == Errc::config) throw;
    fail(Errc::config, std::string("design: ") + e.what());
  }
  fail(Errc::config, "unknown design variant: " + variant);
}

}  // namespace

std::shared_ptr<const SuperpopModel> parse_model_json(const std::string& json_text) {
  return model_from_json(parse_json_text(json_text, "model"));
}

DesignSpec parse_design_json(const std::string& json_text) {
  return design_from_json(parse_json_text(json_text, "design"));
}

ExperimentConfig parse_config(const std::string& json_text) {
  const json j = parse_json_text(json_text, "config");
  require(j.is_object(), Errc::config, "config must be a JSON object");
  require(j.contains("model"), Errc::config, "config: \"model\" required");
  require(j.contains("design"), Errc::config, "config: \"design\" required");

  ExperimentConfig cfg;
  cfg.model = model_from_json(j["model"]);
  cfg.design = design_from_json(j["design"]);

  require(j.contains("n_grid") && j["n_grid"].is_array() && !j["n_grid"].empty(), Errc::config,
          "config: non-empty \"n_grid\" required");
  cfg.n_grid = j["n_grid"].get<std::vector<std::int64_t>>();
  for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
    require(cfg.n_grid[i] >= 1, Errc::config, "n_grid entries must be positive");
    if (i) require(cfg.n_grid[i] > cfg.n_grid[i - 1], Errc::config, "n_grid must be strictly increasing");
  }

  cfg.replicates = j.value("replicates", std::int64_t{1});
  require(cfg.replicates >= 1, Errc::config, "replicates must be >= 1");
  cfg.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("quantile_interval")) {
    const auto& qi = j["quantile_interval"];
    require(qi.is_array() && qi.size() == 2, Errc::config, "quantile_interval must be [lo, hi]");
    cfg.quantile_lo = qi[0].get<double>();
    cfg.quantile_hi = qi[1].get<double>();
  }
  require(cfg.quantile_lo > 0.0 && cfg.quantile_lo <= cfg.quantile_hi && cfg.quantile_hi < 1.0,
          Errc::config, "quantile_interval must satisfy 0 < lo <= hi < 1");
  cfg.quantile_grid = j.value("quantile_grid", 512);
  require(cfg.quantile_grid >= 2, Errc::config, "quantile_grid must be >= 2");

  cfg.mode = j.value("mode", std::string("converge"));
  require(cfg.mode == "converge" || cfg.mode == "audit" || cfg.mode == "couple" ||
              cfg.mode == "enumerate",
          Errc::config, "mode must be converge | audit | couple | enumerate");
  cfg.output = j.value("output", std::string());
  cfg.threads = j.value("threads", 0);
  require(cfg.threads >= 0, Errc::config, "threads must be >= 0");
  cfg.small_n = j.value("n", std::int64_t{0});
  cfg.couple_x = j.value("x", 0.5);
  require(cfg.couple_x >= 0.0 && cfg.couple_x <= 1.0, Errc::config, "x must lie in [0,1]");

  // Audit test points default to model quantiles.
  const SuperpopModel& m = *cfg.model;
  cfg.audit.y_pairs = {{m.quantile(0.1), m.quantile(0.2)},
                       {m.quantile(0.3), m.quantile(0.6)},
                       {m.quantile(0.7), m.quantile(0.9)}};
  for (int i = 1; i <= 9; ++i) cfg.audit.alpha_grid.push_back(m.quantile(0.1 * i));
  if (j.contains("audit")) {
    const auto& ja = j["audit"];
    require(ja.is_object(), Errc::config, "audit must be an object");
    if (ja.contains("y_pairs")) {
      cfg.audit.y_pairs.clear();
      for (const auto& pr : ja["y_pairs"]) {
        require(pr.is_array() && pr.size() == 2, Errc::config, "y_pairs entries must be [y1, y2]");
        cfg.audit.y_pairs.emplace_back(pr[0].get<double>(), pr[1].get<double>());
      }
      require(!cfg.audit.y_pairs.empty(), Errc::config, "y_pairs must be non-empty");
    }
    if (ja.contains("alpha_grid")) {
      cfg.audit.alpha_grid = ja["alpha_grid"].get<std::vector<double>>();
      require(!cfg.audit.alpha_grid.empty(), Errc::config, "alpha_grid must be non-empty");
    }
    cfg.audit.budget.reps = ja.value("reps", cfg.audit.budget.reps);
    cfg.audit.budget.pointwise_reps = ja.value("pointwise_reps", cfg.audit.budget.pointwise_reps);
    cfg.audit.budget.pair_draws = ja.value("pair_draws", cfg.audit.budget.pair_draws);
    cfg.audit.budget.inner_reps = ja.value("inner_reps", cfg.audit.budget.inner_reps);
    cfg.audit.budget.empty_reps = ja.value("empty_reps", cfg.audit.budget.empty_reps);
  }
  return cfg;
}

}  // namespace infsel
