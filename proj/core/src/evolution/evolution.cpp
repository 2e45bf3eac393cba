#include "safemut/evolution/evolution.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "safemut/errors.hpp"
#include "safemut/net/init.hpp"

namespace safemut::evolution {

namespace {

constexpr std::uint64_t kInitStream = 0;
constexpr std::uint64_t kStepStream = 1;
constexpr std::size_t kMaxFailedSteps = 100;

void note_solution(Population& pop, const Member& m) {
  if (m.record.solved && !pop.first_solution) {
    pop.first_solution = pop.evaluations_used;
    pop.first_solution_genome = m.genome;
  }
}

}  // namespace

std::size_t Population::best_index() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < members.size(); ++i) {
    if (members[i].fitness() > members[best].fitness()) best = i;
  }
  return best;
}

std::size_t Population::worst_index() const {
  std::size_t worst = 0;
  for (std::size_t i = 1; i < members.size(); ++i) {
    if (members[i].fitness() < members[worst].fitness()) worst = i;
  }
  return worst;
}

Population init_population(const Domain& domain, std::size_t size, std::uint64_t master_seed) {
  if (size < 2) throw ConfigError("population size must be at least 2");
  Population pop;
  pop.members.reserve(size);
  const auto& arch = domain.architecture();
  for (std::size_t i = 0; i < size; ++i) {
    Rng rng = make_rng(master_seed, {kInitStream, i});
    Member m;
    m.genome.params = net::xavier_init(arch, rng);
    m.genome.arch_id = arch.id;
    m.genome.id = pop.next_id++;
    m.record = domain.evaluate(m.genome.params);
    ++pop.evaluations_used;
    note_solution(pop, m);
    pop.members.push_back(std::move(m));
  }
  return pop;
}

std::size_t tournament_select(const Population& pop, std::size_t k, Rng& rng) {
  const std::size_t n = pop.size();
  if (k == 0 || k > n) {
    throw ConfigError("tournament size " + std::to_string(k) + " must be in [1, " + std::to_string(n) + "]");
  }
  // Partial Fisher-Yates over the index range.
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::size_t best = n;
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
    const std::size_t c = idx[i];
    if (best == n || pop.members[c].fitness() > pop.members[best].fitness() ||
        (pop.members[c].fitness() == pop.members[best].fitness() && c < best)) {
      best = c;
    }
  }
  return best;
}

std::size_t steady_state_step(Population& pop, const Domain& domain,
                              const mutation::MutationConfig& mutation_cfg,
                              const EvolutionConfig& cfg, Rng& rng,
                              const OffspringObserver& observer) {
  const auto& arch = domain.architecture();
  const std::size_t batch = std::max<std::size_t>(1, cfg.offspring_batch);

  struct Offspring {
    Member member;
    std::size_t parent;
    mutation::MutationReport report;
  };
  std::vector<Offspring> offspring;
  offspring.reserve(batch);

  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t attempt = 0; attempt <= cfg.max_retries; ++attempt) {
      Rng sub(rng());
      try {
        const std::size_t parent = tournament_select(pop, cfg.tournament_size, sub);
        const Member& p = pop.members[parent];
        auto mutated = mutation::mutate(arch, p.genome.params, p.record.archive, mutation_cfg, sub);
        Member child;
        child.record = domain.evaluate(mutated.child);
        child.genome.params = std::move(mutated.child);
        child.genome.arch_id = arch.id;
        child.genome.lineage = {static_cast<std::int64_t>(p.genome.id),
                                std::string(mutation::to_string(mutation_cfg.method))};
        offspring.push_back({std::move(child), parent, mutated.report});
        break;
      } catch (const NumericError&) {
        // Retry on the next substream.
      }
    }
  }

  for (auto& o : offspring) {
    o.member.genome.id = pop.next_id++;
    ++pop.evaluations_used;
    note_solution(pop, o.member);

    OffspringEvent event;
    event.evaluation = pop.evaluations_used;
    event.child_id = o.member.genome.id;
    event.parent_id = static_cast<std::uint64_t>(o.member.genome.lineage.parent_id);
    event.parent_fitness = pop.members[o.parent].fitness();
    event.child_fitness = o.member.fitness();
    event.report = o.report;

    std::size_t victim = 0;
    if (cfg.replacement == Replacement::kWorst) {
      victim = pop.worst_index();
      event.accepted = o.member.fitness() >= pop.members[victim].fitness();
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, pop.size() - 1);
      victim = pick(rng);
      event.accepted = true;
    }
    if (event.accepted) pop.members[victim] = std::move(o.member);
    if (observer) observer(event);
  }
  return offspring.size();
}

RunResult run_evolution(const Domain& domain, const mutation::MutationConfig& mutation_cfg,
                        const EvolutionConfig& cfg, std::uint64_t master_seed,
                        const OffspringObserver& observer) {
  mutation_cfg.validate();
  if (cfg.budget <= cfg.population_size) throw ConfigError("budget must exceed the population size");
  if (cfg.curve_interval == 0) throw ConfigError("curve interval must be positive");

  Population pop = init_population(domain, cfg.population_size, derive_seed(master_seed, {kInitStream}));
  Rng rng = make_rng(master_seed, {kStepStream});

  RunResult result;
  std::size_t next_checkpoint = cfg.curve_interval;
  auto record_curve = [&] {
    while (next_checkpoint <= pop.evaluations_used) {
      result.curve.push_back({next_checkpoint, pop.members[pop.best_index()].fitness(),
                              pop.first_solution && *pop.first_solution <= next_checkpoint});
      next_checkpoint += cfg.curve_interval;
    }
  };
  record_curve();

  std::size_t failed = 0;
  while (pop.evaluations_used < cfg.budget && !(cfg.stop_on_solution && pop.first_solution)) {
    if (steady_state_step(pop, domain, mutation_cfg, cfg, rng, observer) == 0) {
      if (++failed > kMaxFailedSteps) throw NumericError("evolution stalled: every offspring failed");
    } else {
      failed = 0;
    }
    record_curve();
  }
  if (result.curve.empty() || result.curve.back().evaluation != pop.evaluations_used) {
    result.curve.push_back({pop.evaluations_used, pop.members[pop.best_index()].fitness(),
                            pop.first_solution.has_value()});
  }

  result.solved = pop.first_solution.has_value();
  result.evaluations_to_solution = pop.first_solution;
  result.evaluations_used = pop.evaluations_used;
  const Member& best = pop.members[pop.best_index()];
  result.final_best_fitness = best.fitness();
  result.best = best.genome;
  result.solution = pop.first_solution_genome;
  return result;
}

RunResult run_hillclimber(const Domain& domain, const mutation::MutationConfig& mutation_cfg,
                          std::size_t iterations, std::uint64_t master_seed, double init_sigma) {
  mutation_cfg.validate();
  if (iterations == 0) throw ConfigError("hill-climber needs at least one iteration");
  const auto& arch = domain.architecture();

  Rng init_rng = make_rng(master_seed, {kInitStream});
  Member champion;
  champion.genome.params = ad::ParamVector(gaussian_vector(ad::param_count(arch), init_sigma, init_rng));
  champion.genome.arch_id = arch.id;
  champion.record = domain.evaluate(champion.genome.params);

  RunResult result;
  std::size_t evaluations = 1;
  if (champion.record.solved) result.evaluations_to_solution = evaluations;

  Rng rng = make_rng(master_seed, {kStepStream});
  for (std::size_t it = 1; it <= iterations; ++it) {
    Rng sub(rng());
    try {
      auto mutated = mutation::mutate(arch, champion.genome.params, champion.record.archive, mutation_cfg, sub);
      EvalRecord record = domain.evaluate(mutated.child);
      ++evaluations;
      if (record.fitness > champion.fitness()) {
        champion.genome.lineage = {static_cast<std::int64_t>(champion.genome.id),
                                   std::string(mutation::to_string(mutation_cfg.method))};
        champion.genome.id = it;
        champion.genome.params = std::move(mutated.child);
        champion.record = std::move(record);
      }
    } catch (const NumericError&) {
      // A failed offspring leaves the champion in place.
    }
    if (champion.record.solved && !result.evaluations_to_solution) result.evaluations_to_solution = evaluations;
    result.curve.push_back({it, champion.fitness(), champion.record.solved});
  }

  result.solved = champion.record.solved;
  result.evaluations_used = evaluations;
  result.final_best_fitness = champion.fitness();
  result.best = champion.genome;
  if (result.solved) result.solution = champion.genome;
  return result;
}

}  // namespace safemut::evolution
