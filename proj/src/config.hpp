#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "conditions.hpp"
#include "designs.hpp"
#include "superpop.hpp"

namespace infsel {

// Checker parameters for audit mode; defaults derive the test points from the
// model's quantiles when the config leaves them out.
struct AuditParams {
  std::vector<std::pair<double, double>> y_pairs;
  std::vector<double> alpha_grid;
  CheckBudget budget;
};

struct ExperimentConfig {
  std::shared_ptr<const SuperpopModel> model;
  DesignSpec design;
  std::vector<std::int64_t> n_grid;
  std::int64_t replicates = 1;
  std::uint64_t seed = 0;
  double quantile_lo = 0.1;
  double quantile_hi = 0.9;
  int quantile_grid = 512;
  std::string mode = "converge";  // converge | audit | couple | enumerate
  std::string output;
  int threads = 0;  // 0 = hardware concurrency
  std::int64_t small_n = 0;  // population size for couple/enumerate; 0 = n_grid front
  double couple_x = 0.5;
  AuditParams audit;
};

// Parses and validates the experiment JSON. Schema (lower_snake_case keys):
//   {"model":{...},"design":{...},"n_grid":[...],"replicates":int,"seed":int,
//    "quantile_interval":[a,b],"quantile_grid":int,"mode":"converge",
//    "output":"path.csv", optional "threads", "n", "x", "audit":{...}}
ExperimentConfig parse_config(const std::string& json_text);

std::shared_ptr<const SuperpopModel> parse_model_json(const std::string& json_text);
DesignSpec parse_design_json(const std::string& json_text);

}  // namespace infsel
