#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "safemut/evolution/evolution.hpp"
#include "safemut/harness/config.hpp"

namespace safemut::harness {

struct SuccessPoint {
  std::size_t evaluation = 0;
  double fraction = 0.0;
};

struct RunRecord {
  std::size_t run_id = 0;
  std::uint64_t seed = 0;
  evolution::RunResult result;
  /// Set when the run threw; the campaign carries on without it.
  std::optional<std::string> error;
};

struct CampaignResult {
  std::vector<RunRecord> runs;
  std::vector<SuccessPoint> success;

  std::size_t solved_count() const;
};

/// Seed of run i of a campaign.
std::uint64_t run_seed(std::uint64_t master_seed, std::size_t run_id);

/// n_runs independent runs of the configured algorithm. When out_dir is
/// set, writes curves.csv, summary.json, solutions/run_<i>.genome and, with
/// log_offspring, offspring.csv.
CampaignResult run_campaign(const ExperimentConfig& cfg, const evolution::Domain& domain,
                            const std::optional<std::filesystem::path>& out_dir = std::nullopt);
CampaignResult run_campaign(const ExperimentConfig& cfg,
                            const std::optional<std::filesystem::path>& out_dir = std::nullopt);

/// Fraction of runs solved by each curve checkpoint.
std::vector<SuccessPoint> success_curve(std::span<const RunRecord> runs, std::size_t interval,
                                        std::size_t horizon);

nlohmann::json summary_json(const ExperimentConfig& cfg, const CampaignResult& result);
/// Columns: run_id,evaluation,best_fitness,solved
void write_curves_csv(std::ostream& out, const CampaignResult& result);

/// Linear-interpolated quantile of a sample (q in [0, 1]); NaN when empty.
double quantile(std::vector<double> values, double q);

struct GridRow {
  double strength = 0.0;
  double mean_final_fitness = 0.0;
  std::size_t solved = 0;
  std::size_t runs = 0;
};

struct GridResult {
  std::vector<GridRow> rows;
  double best_strength = 0.0;
};

/// grid_runs-run mini-campaigns at each strength; the best strength has the
/// highest mean final best fitness, ties going to the smaller strength.
GridResult grid_search(const ExperimentConfig& cfg, const evolution::Domain& domain);
/// Columns: strength,mean_final_fitness,solved,runs
void write_grid_csv(std::ostream& out, const GridResult& result);

}  // namespace safemut::harness
