#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "safemut/evolution/domain.hpp"
#include "safemut/mutation/config.hpp"
#include "safemut/mutation/operators.hpp"
#include "safemut/net/genome.hpp"
#include "safemut/random.hpp"

namespace safemut::evolution {

struct Member {
  net::Genome genome;
  EvalRecord record;

  double fitness() const { return record.fitness; }
};

struct Population {
  std::vector<Member> members;
  std::size_t evaluations_used = 0;
  std::uint64_t next_id = 0;
  /// Evaluation count at which the first solved rollout happened.
  std::optional<std::size_t> first_solution;
  std::optional<net::Genome> first_solution_genome;

  std::size_t size() const { return members.size(); }
  std::size_t best_index() const;
  std::size_t worst_index() const;
};

enum class Replacement { kWorst, kRandom };

struct EvolutionConfig {
  std::size_t population_size = 250;
  std::size_t tournament_size = 5;
  std::size_t budget = 100000;
  Replacement replacement = Replacement::kWorst;
  std::size_t curve_interval = 100;
  std::size_t max_retries = 3;
  /// Offspring generated from one population snapshot before replacements
  /// are applied in offspring order. 1 is the plain steady-state loop.
  std::size_t offspring_batch = 1;
  /// Stop as soon as any evaluation solves the domain.
  bool stop_on_solution = true;
};

/// Per-offspring report, handed to an optional observer.
struct OffspringEvent {
  std::size_t evaluation = 0;
  std::uint64_t child_id = 0;
  std::uint64_t parent_id = 0;
  double parent_fitness = 0.0;
  double child_fitness = 0.0;
  bool accepted = false;
  mutation::MutationReport report;
};
using OffspringObserver = std::function<void(const OffspringEvent&)>;

/// size genomes from xavier_init, each on its own stream derived from
/// master_seed, each evaluated once.
Population init_population(const Domain& domain, std::size_t size, std::uint64_t master_seed);

/// Index of the fittest of k members drawn without replacement; ties go to
/// the lower index.
std::size_t tournament_select(const Population& pop, std::size_t k, Rng& rng);

/// One steady-state replacement round: select, mutate from the parent's
/// archive, evaluate, replace. A mutation or evaluation that throws is
/// retried on a fresh stream up to max_retries times; returns the number of
/// offspring evaluated (0 when every attempt failed).
std::size_t steady_state_step(Population& pop, const Domain& domain,
                              const mutation::MutationConfig& mutation_cfg,
                              const EvolutionConfig& cfg, Rng& rng,
                              const OffspringObserver& observer = {});

struct CurvePoint {
  std::size_t evaluation = 0;
  double best_fitness = 0.0;
  bool solved = false;
};

struct RunResult {
  bool solved = false;
  std::optional<std::size_t> evaluations_to_solution;
  std::size_t evaluations_used = 0;
  double final_best_fitness = 0.0;
  std::vector<CurvePoint> curve;
  net::Genome best;
  /// The first solving genome, when there is one.
  std::optional<net::Genome> solution;
};

/// Steady-state evolution until a rollout solves the domain or the budget
/// of evaluations (initialization included) is spent.
RunResult run_evolution(const Domain& domain, const mutation::MutationConfig& mutation_cfg,
                        const EvolutionConfig& cfg, std::uint64_t master_seed,
                        const OffspringObserver& observer = {});

/// (1+1) hill-climber: champion starts from N(0, init_sigma^2) weights and
/// is replaced only on strict improvement. Runs exactly `iterations`
/// iterations; the curve holds the champion fitness after each iteration.
RunResult run_hillclimber(const Domain& domain, const mutation::MutationConfig& mutation_cfg,
                          std::size_t iterations, std::uint64_t master_seed,
                          double init_sigma = 0.01);

}  // namespace safemut::evolution
