#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "safemut/domains/maze.hpp"
#include "safemut/domains/parity.hpp"
#include "safemut/evolution/evolution.hpp"
#include "safemut/mutation/config.hpp"

namespace safemut::harness {

enum class Algorithm { kSteadyState, kHillClimber };

std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view name);

/// Everything one campaign needs. Loaded from JSON; any omitted key takes
/// the default for its domain (see default_config).
struct ExperimentConfig {
  std::string name = "experiment";
  /// toy_easy, toy_medium, toy_washout, parity or maze.
  std::string domain = "parity";
  /// Empty means the domain's own network.
  std::string architecture;
  /// Maze map file, resolved against the config file's directory.
  std::filesystem::path map;
  domains::MazeSettings maze;
  domains::ParityFitness parity_fitness = domains::ParityFitness::kCount;

  Algorithm algorithm = Algorithm::kSteadyState;
  mutation::MutationConfig mutation;
  evolution::EvolutionConfig evolution;
  std::size_t iterations = 2000;  // hill-climber only
  double init_sigma = 0.01;       // hill-climber only

  std::size_t n_runs = 1;
  std::uint64_t master_seed = 0;
  std::filesystem::path output = "results";
  bool log_offspring = false;

  std::vector<double> grid_strengths = {1e-1, 5e-2, 1e-2, 5e-3, 1e-3, 1e-4};
  std::size_t grid_runs = 8;

  std::vector<mutation::MutationConfig> probes;
  std::size_t perturbations = 50;

  /// Throws ConfigError on unresolvable ids or out-of-range values.
  void validate() const;
};

/// Mutation strength tuned per domain and method (control sigma, gradient
/// sigma or SM-R target divergence). Throws ConfigError when no setting
/// exists for the pair.
double default_strength(std::string_view domain, mutation::Method method);

/// Defaults for a domain: population, budget, algorithm and the tuned
/// strength of the given method.
ExperimentConfig default_config(std::string_view domain, mutation::Method method);

ExperimentConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
nlohmann::json to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Architecture named by the config, or the domain's default.
ad::ArchitectureSpec resolve_architecture(const ExperimentConfig& cfg);
std::unique_ptr<evolution::Domain> make_domain(const ExperimentConfig& cfg);

}  // namespace safemut::harness
