#include "harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "coupling.hpp"
#include "ecdf.hpp"
#include "error.hpp"
#include "rng.hpp"
#include "stats_util.hpp"
#include "weights.hpp"

namespace infsel {

namespace {

std::string num17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string indicator_string(const IndicatorVector& ind, bool binary) {
  std::string s;
  if (binary) {
    s.reserve(ind.counts.size());
    for (auto c : ind.counts) s.push_back(c ? '1' : '0');
    return s;
  }
  for (std::size_t k = 0; k < ind.counts.size(); ++k) {
    if (k) s.push_back('-');
    s += std::to_string(ind.counts[k]);
  }
  return s;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  require(os.good(), Errc::io, "cannot open output file: " + path);
  os << content;
  require(os.good(), Errc::io, "failed writing output file: " + path);
}

Population prefix_population(const ExperimentConfig& config) {
  const std::int64_t n = config.small_n > 0 ? config.small_n : config.n_grid.front();
  return draw_population(*config.model, n, mix64(config.seed, 0x706F70ULL));
}

}  // namespace

std::string ConvergenceReport::to_csv() const {
  std::ostringstream os;
  os << "design,N,replicate,realized_n,empty,sup_dist,sup_dist_sq,quantile_sup_dist\n";
  for (const auto& r : rows) {
    os << design_tag << ',' << r.n << ',' << r.replicate << ',' << r.realized_n << ','
       << (r.empty ? 1 : 0) << ',' << num17(r.sup_dist) << ',' << num17(r.sup_dist_sq) << ','
       << num17(r.quantile_sup_dist) << '\n';
  }
  return os.str();
}

std::string ConvergenceReport::summary_json() const {
  std::ostringstream os;
  os << "{\"design\":\"" << design_tag << "\",\"seed\":" << seed << ",\"replicates\":" << replicates
     << ",\"aggregates\":[";
  for (std::size_t i = 0; i < aggregates.size(); ++i) {
    const auto& a = aggregates[i];
    if (i) os << ',';
    os << "{\"n\":" << a.n << ",\"mean_sup\":" << num17(a.mean_sup)
       << ",\"se_sup\":" << num17(a.se_sup) << ",\"mean_sup_sq\":" << num17(a.mean_sup_sq)
       << ",\"se_sup_sq\":" << num17(a.se_sup_sq)
       << ",\"mean_quantile_sup\":" << num17(a.mean_quantile_sup)
       << ",\"se_quantile_sup\":" << num17(a.se_quantile_sup) << ",\"empty_count\":" << a.empty_count
       << ",\"empty_rate\":" << num17(a.empty_rate);
    if (a.pn0_valid) os << ",\"pn0_bound\":" << num17(a.pn0_bound);
    os << '}';
  }
  os << ']';
  if (slope_valid)
    os << ",\"decay_slope\":" << num17(decay_slope) << ",\"decay_r2\":" << num17(decay_r2);
  os << '}';
  return os.str();
}

ConvergenceReport run_convergence(const ExperimentConfig& config) {
  const SuperpopModel& model = *config.model;
  WeightSpec weight = [&] {
    try {
      return builtin_weight(config.design, model);
    } catch (const Error& e) {
      if (e.code() == Errc::no_limit)
        fail(Errc::no_limit,
             std::string(e.what()) + "; run mode=audit to see which condition fails");
      throw;
    }
  }();
  const LimitCdf limit(std::move(weight), model);

  ConvergenceReport report;
  report.design_tag = config.design.tag();
  report.n_grid = config.n_grid;
  report.replicates = config.replicates;
  report.seed = config.seed;
  report.rows.resize(config.n_grid.size() * static_cast<std::size_t>(config.replicates));

  for (std::int64_t n : config.n_grid) config.design.validate_for(n);

  const std::size_t tasks = report.rows.size();
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks) return;
      const std::size_t ni = t / static_cast<std::size_t>(config.replicates);
      const std::int64_t rep = static_cast<std::int64_t>(t % static_cast<std::size_t>(config.replicates));
      const std::int64_t n = config.n_grid[ni];
      const std::uint64_t rep_seed = mix64(config.seed, ni, static_cast<std::uint64_t>(rep));
      const Population pop = draw_population(model, n, mix64(rep_seed, 1));
      const IndicatorVector ind = sample(config.design, pop, mix64(rep_seed, 2));
      const StepCdf step = empirical_cdf(pop, ind);
      ConvergenceRow row;
      row.n = n;
      row.replicate = rep;
      row.realized_n = ind.total;
      row.empty = ind.empty_sample();
      row.sup_dist = sup_distance(step, limit);  // the empty step yields 1 by the tail term
      row.sup_dist_sq = row.sup_dist * row.sup_dist;
      row.quantile_sup_dist =
          row.empty ? std::nan("")
                    : quantile_sup_distance(step, limit, config.quantile_lo, config.quantile_hi,
                                            config.quantile_grid);
      report.rows[t] = row;
    }
  };

  unsigned n_threads = config.threads > 0 ? static_cast<unsigned>(config.threads)
                                          : std::max(1u, std::thread::hardware_concurrency());
  n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, tasks));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // Aggregates in fixed row order, recomputable from the CSV exactly.
  std::vector<double> mean_sup_sq_series;
  for (std::size_t ni = 0; ni < config.n_grid.size(); ++ni) {
    std::vector<double> sup, supsq, qsup, nvals;
    std::int64_t empties = 0;
    for (std::int64_t rep = 0; rep < config.replicates; ++rep) {
      const auto& row = report.rows[ni * static_cast<std::size_t>(config.replicates) +
                                    static_cast<std::size_t>(rep)];
      sup.push_back(row.sup_dist);
      supsq.push_back(row.sup_dist_sq);
      nvals.push_back(static_cast<double>(row.realized_n));
      if (row.empty)
        ++empties;
      else
        qsup.push_back(row.quantile_sup_dist);
    }
    ConvergenceAggregate agg;
    agg.n = config.n_grid[ni];
    agg.mean_sup = mean_of(sup);
    agg.se_sup = se_of_mean(sup, agg.mean_sup);
    agg.mean_sup_sq = mean_of(supsq);
    agg.se_sup_sq = se_of_mean(supsq, agg.mean_sup_sq);
    if (!qsup.empty()) {
      agg.mean_quantile_sup = mean_of(qsup);
      agg.se_quantile_sup = se_of_mean(qsup, agg.mean_quantile_sup);
    } else {
      agg.mean_quantile_sup = std::nan("");
      agg.se_quantile_sup = std::nan("");
    }
    agg.empty_count = empties;
    agg.empty_rate = static_cast<double>(empties) / static_cast<double>(config.replicates);
    const double en = mean_of(nvals);
    if (en > 1.0) {
      agg.pn0_bound = empty_sample_bound(en, central_moment(nvals, en, 2));
      agg.pn0_valid = true;
    }
    report.aggregates.push_back(agg);
    mean_sup_sq_series.push_back(agg.mean_sup_sq);
  }

  const PowerFit fit = fit_power_law(config.n_grid, mean_sup_sq_series);
  report.decay_slope = fit.slope;
  report.decay_r2 = fit.r2;
  report.slope_valid = fit.valid;
  return report;
}

ConditionReport run_audit(const ExperimentConfig& config) {
  const DesignSpec& d = config.design;
  const SuperpopModel& model = *config.model;
  ConditionReport report;
  report.design_tag = d.tag();
  report.model_tag = model.tag();
  report.seed = config.seed;

  const VerdictPolicy policy;
  if (d.independent_of_y() && !d.with_replacement()) {
    report.entries.push_back(
        check_A4(d, model, config.n_grid, config.audit.budget.reps, config.seed, policy));
    return report;
  }
  if (!d.with_replacement()) {
    auto a3 = check_A3(d, model, config.audit.y_pairs, config.n_grid, config.audit.budget,
                       config.seed, policy);
    report.entries.insert(report.entries.end(), std::make_move_iterator(a3.begin()),
                          std::make_move_iterator(a3.end()));
  }
  auto a1 = check_A1_integrals(d, model, config.n_grid, config.audit.budget, config.seed, policy);
  report.entries.insert(report.entries.end(), std::make_move_iterator(a1.begin()),
                        std::make_move_iterator(a1.end()));
  auto a2 = check_A2(d, model, config.audit.alpha_grid, config.n_grid, config.audit.budget,
                     config.seed, policy);
  report.entries.insert(report.entries.end(), std::make_move_iterator(a2.begin()),
                        std::make_move_iterator(a2.end()));
  return report;
}

std::string run_enumerate_csv(const ExperimentConfig& config) {
  const Population pop = prefix_population(config);
  const auto support = enumerate_support(config.design, pop);
  std::ostringstream os;
  os << "indicator,probability\n";
  const bool binary = !config.design.with_replacement();
  for (const auto& pt : support)
    os << indicator_string(pt.indicator, binary) << ',' << num17(pt.prob) << '\n';
  return os.str();
}

std::string run_couple_csv(const ExperimentConfig& config) {
  const Population pop = prefix_population(config);
  const LimitCdf limit(builtin_weight(config.design, *config.model), *config.model);
  const CouplingPartition part = build_coupling(config.design, pop, limit);
  std::ostringstream os;
  os << "indicator,h,interval_lo,interval_hi\n";
  const bool binary = !config.design.with_replacement();
  for (const auto& atom : part.atoms)
    os << indicator_string(atom.indicator, binary) << ',' << num17(atom.h) << ','
       << num17(atom.cum_lo) << ',' << num17(atom.cum_hi) << '\n';
  return os.str();
}

std::string run_and_write(const ExperimentConfig& config) {
  if (config.mode == "converge") {
    require(!config.output.empty(), Errc::config, "converge mode requires an output path");
    const ConvergenceReport report = run_convergence(config);
    write_file(config.output, report.to_csv());
    return report.summary_json();
  }
  if (config.mode == "audit") {
    const ConditionReport report = run_audit(config);
    const std::string text = to_json(report);
    if (!config.output.empty()) write_file(config.output, text);
    return text;
  }
  if (config.mode == "enumerate") {
    const std::string csv = run_enumerate_csv(config);
    require(!config.output.empty(), Errc::config, "enumerate mode requires an output path");
    write_file(config.output, csv);
    const std::size_t rows = static_cast<std::size_t>(
        std::count(csv.begin(), csv.end(), '\n')) - 1;
    return "{\"mode\":\"enumerate\",\"rows\":" + std::to_string(rows) + ",\"output\":\"" +
           config.output + "\"}";
  }
  if (config.mode == "couple") {
    const std::string csv = run_couple_csv(config);
    require(!config.output.empty(), Errc::config, "couple mode requires an output path");
    write_file(config.output, csv);
    const std::size_t rows = static_cast<std::size_t>(
        std::count(csv.begin(), csv.end(), '\n')) - 1;
    return "{\"mode\":\"couple\",\"atoms\":" + std::to_string(rows) + ",\"output\":\"" +
           config.output + "\"}";
  }
  fail(Errc::config, "unknown mode: " + config.mode);
}

}  // namespace infsel
