#include "safemut/harness/campaign.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

#include "csv.hpp"
#include "safemut/errors.hpp"

namespace safemut::harness {

using detail::format_double;
using nlohmann::json;

namespace {

void check_stream(const std::ostream& out, const std::filesystem::path& path) {
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::size_t horizon_of(const ExperimentConfig& cfg) {
  return cfg.algorithm == Algorithm::kSteadyState ? cfg.evolution.budget : cfg.iterations + 1;
}

}  // namespace

std::size_t CampaignResult::solved_count() const {
  return static_cast<std::size_t>(
      std::count_if(runs.begin(), runs.end(), [](const RunRecord& r) { return !r.error && r.result.solved; }));
}

std::uint64_t run_seed(std::uint64_t master_seed, std::size_t run_id) { return derive_seed(master_seed, {run_id}); }

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<SuccessPoint> success_curve(std::span<const RunRecord> runs, std::size_t interval,
                                        std::size_t horizon) {
  if (interval == 0) throw ConfigError("curve interval must be positive");
  std::vector<std::size_t> checkpoints;
  for (std::size_t e = interval; e <= horizon; e += interval) checkpoints.push_back(e);
  if (checkpoints.empty() || checkpoints.back() != horizon) checkpoints.push_back(horizon);

  std::vector<SuccessPoint> curve;
  const double n = static_cast<double>(std::max<std::size_t>(runs.size(), 1));
  for (std::size_t e : checkpoints) {
    std::size_t solved = 0;
    for (const auto& r : runs) {
      if (!r.error && r.result.evaluations_to_solution && *r.result.evaluations_to_solution <= e) ++solved;
    }
    curve.push_back({e, static_cast<double>(solved) / n});
  }
  return curve;
}

CampaignResult run_campaign(const ExperimentConfig& cfg, const evolution::Domain& domain,
                            const std::optional<std::filesystem::path>& out_dir) {
  cfg.validate();
  std::ofstream offspring_log;
  if (out_dir) {
    std::filesystem::create_directories(*out_dir / "solutions");
    if (cfg.log_offspring && cfg.algorithm == Algorithm::kSteadyState) {
      offspring_log.open(*out_dir / "offspring.csv");
      check_stream(offspring_log, *out_dir / "offspring.csv");
      offspring_log << "run_id,evaluation,child_id,parent_id,parent_fitness,child_fitness,accepted,"
                       "divergence,line_search_iterations,line_search_converged,clamp_count,fell_back_to_control\n";
    }
  }

  CampaignResult result;
  for (std::size_t i = 0; i < cfg.n_runs; ++i) {
    RunRecord rec;
    rec.run_id = i;
    rec.seed = run_seed(cfg.master_seed, i);
    evolution::OffspringObserver observer;
    if (offspring_log.is_open()) {
      observer = [&offspring_log, i](const evolution::OffspringEvent& e) {
        offspring_log << i << ',' << e.evaluation << ',' << e.child_id << ',' << e.parent_id << ','
                      << format_double(e.parent_fitness) << ',' << format_double(e.child_fitness) << ','
                      << (e.accepted ? 1 : 0) << ',' << format_double(e.report.divergence) << ','
                      << e.report.line_search_iterations << ',' << (e.report.line_search_converged ? 1 : 0) << ','
                      << e.report.clamp_count << ',' << (e.report.fell_back_to_control ? 1 : 0) << '\n';
      };
    }
    try {
      rec.result = cfg.algorithm == Algorithm::kSteadyState
                       ? evolution::run_evolution(domain, cfg.mutation, cfg.evolution, rec.seed, observer)
                       : evolution::run_hillclimber(domain, cfg.mutation, cfg.iterations, rec.seed, cfg.init_sigma);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      rec.error = e.what();
    }
    result.runs.push_back(std::move(rec));
  }
  result.success = success_curve(result.runs, cfg.evolution.curve_interval, horizon_of(cfg));

  if (out_dir) {
    {
      std::ofstream curves(*out_dir / "curves.csv");
      write_curves_csv(curves, result);
      check_stream(curves, *out_dir / "curves.csv");
    }
    {
      std::ofstream summary(*out_dir / "summary.json");
      summary << summary_json(cfg, result).dump(2) << '\n';
      check_stream(summary, *out_dir / "summary.json");
    }
    for (const auto& r : result.runs) {
      if (r.result.solution) {
        net::save_genome(*out_dir / "solutions" / ("run_" + std::to_string(r.run_id) + ".genome"),
                         *r.result.solution);
      }
    }
  }
  return result;
}

CampaignResult run_campaign(const ExperimentConfig& cfg, const std::optional<std::filesystem::path>& out_dir) {
  auto domain = make_domain(cfg);
  return run_campaign(cfg, *domain, out_dir);
}

json summary_json(const ExperimentConfig& cfg, const CampaignResult& result) {
  std::vector<double> to_solution;
  std::vector<double> finals;
  json runs = json::array();
  for (const auto& r : result.runs) {
    json row = {{"run_id", r.run_id},
                {"seed", r.seed},
                {"solved", !r.error && r.result.solved},
                {"evaluations_to_solution", nullptr},
                {"evaluations_used", r.result.evaluations_used},
                {"final_best_fitness", nullptr},
                {"error", nullptr}};
    if (r.error) {
      row["error"] = *r.error;
    } else {
      row["final_best_fitness"] = r.result.final_best_fitness;
      finals.push_back(r.result.final_best_fitness);
      if (r.result.evaluations_to_solution) {
        row["evaluations_to_solution"] = *r.result.evaluations_to_solution;
        to_solution.push_back(static_cast<double>(*r.result.evaluations_to_solution));
      }
    }
    runs.push_back(std::move(row));
  }

  json success = json::array();
  for (const auto& p : result.success) success.push_back({{"evaluation", p.evaluation}, {"fraction", p.fraction}});

  json ets = nullptr;
  if (!to_solution.empty()) {
    ets = {{"count", to_solution.size()},
           {"min", quantile(to_solution, 0.0)},
           {"q25", quantile(to_solution, 0.25)},
           {"median", quantile(to_solution, 0.5)},
           {"q75", quantile(to_solution, 0.75)},
           {"max", quantile(to_solution, 1.0)}};
  }
  json fitness = nullptr;
  if (!finals.empty()) {
    double mean = 0.0;
    for (double f : finals) mean += f;
    fitness = {{"median", quantile(finals, 0.5)}, {"mean", mean / static_cast<double>(finals.size())}};
  }

  return {{"config", to_json(cfg)},
          {"solved_runs", result.solved_count()},
          {"n_runs", result.runs.size()},
          {"success_fraction", success},
          {"evaluations_to_solution", ets},
          {"final_best_fitness", fitness},
          {"runs", runs}};
}

void write_curves_csv(std::ostream& out, const CampaignResult& result) {
  out << "run_id,evaluation,best_fitness,solved\n";
  for (const auto& r : result.runs) {
    for (const auto& p : r.result.curve) {
      out << r.run_id << ',' << p.evaluation << ',' << format_double(p.best_fitness) << ','
          << (p.solved ? 1 : 0) << '\n';
    }
  }
}

GridResult grid_search(const ExperimentConfig& cfg, const evolution::Domain& domain) {
  cfg.validate();
  GridResult grid;
  for (double s : cfg.grid_strengths) {
    ExperimentConfig run_cfg = cfg;
    run_cfg.mutation.strength = s;
    run_cfg.n_runs = cfg.grid_runs;
    const auto campaign = run_campaign(run_cfg, domain);
    GridRow row;
    row.strength = s;
    row.runs = campaign.runs.size();
    row.solved = campaign.solved_count();
    std::size_t ok = 0;
    for (const auto& r : campaign.runs) {
      if (r.error) continue;
      row.mean_final_fitness += r.result.final_best_fitness;
      ++ok;
    }
    row.mean_final_fitness = ok ? row.mean_final_fitness / static_cast<double>(ok)
                                : -std::numeric_limits<double>::infinity();
    grid.rows.push_back(row);
  }
  const GridRow* best = &grid.rows.front();
  for (const auto& row : grid.rows) {
    if (row.mean_final_fitness > best->mean_final_fitness ||
        (row.mean_final_fitness == best->mean_final_fitness && row.strength < best->strength)) {
      best = &row;
    }
  }
  grid.best_strength = best->strength;
  return grid;
}

void write_grid_csv(std::ostream& out, const GridResult& result) {
  out << "strength,mean_final_fitness,solved,runs\n";
  for (const auto& r : result.rows) {
    out << format_double(r.strength) << ',' << format_double(r.mean_final_fitness) << ',' << r.solved << ','
        << r.runs << '\n';
  }
}

}  // namespace safemut::harness
