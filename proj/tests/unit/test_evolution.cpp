#include <gtest/gtest.h>

#include <cmath>

#include "safemut/domains/parity.hpp"
#include "safemut/domains/toy.hpp"
#include "safemut/errors.hpp"
#include "safemut/evolution/evolution.hpp"

using namespace safemut;
using mutation::Method;

namespace {

evolution::Population ramp_population(std::size_t n) {
  evolution::Population pop;
  for (std::size_t i = 0; i < n; ++i) {
    evolution::Member m;
    m.record.fitness = static_cast<double>(i);
    pop.members.push_back(m);
  }
  return pop;
}

mutation::MutationConfig config(Method m, double strength) {
  mutation::MutationConfig c;
  c.method = m;
  c.strength = strength;
  c.measure_divergence = false;
  return c;
}

}  // namespace

TEST(Tournament, FullTournamentPicksGlobalBest) {
  const auto pop = ramp_population(30);
  Rng rng(1);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(evolution::tournament_select(pop, 30, rng), 29u);
}

TEST(Tournament, SizeOneIsUniform) {
  const auto pop = ramp_population(10);
  Rng rng(2);
  std::vector<int> counts(10, 0);
  for (int i = 0; i < 20000; ++i) ++counts[evolution::tournament_select(pop, 1, rng)];
  for (int c : counts) EXPECT_NEAR(c / 20000.0, 0.1, 0.015);
}

TEST(Tournament, BestSelectedWithHypergeometricProbability) {
  const auto pop = ramp_population(250);
  Rng rng(3);
  int best = 0;
  for (int i = 0; i < 10000; ++i) best += evolution::tournament_select(pop, 5, rng) == 249u;
  // 1 - C(249,5)/C(250,5) = 5/250
  const double expected = 1.0 - (245.0 / 250.0);
  EXPECT_NEAR(best / 10000.0, expected, 0.02);
}

TEST(Tournament, TiesGoToLowerIndex) {
  auto pop = ramp_population(5);
  for (auto& m : pop.members) m.record.fitness = 1.0;
  Rng rng(4);
  EXPECT_EQ(evolution::tournament_select(pop, 5, rng), 0u);
  EXPECT_THROW(evolution::tournament_select(pop, 6, rng), ConfigError);
}

TEST(Population, InitIsDeterministicAndCountsEvaluations) {
  const domains::ParityDomain d;
  const auto a = evolution::init_population(d, 12, 77);
  const auto b = evolution::init_population(d, 12, 77);
  EXPECT_EQ(a.evaluations_used, 12u);
  ASSERT_EQ(a.size(), 12u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.members[i].genome.params, b.members[i].genome.params);
    EXPECT_EQ(a.members[i].fitness(), b.members[i].fitness());
  }
  EXPECT_NE(a.members[0].genome.params, a.members[1].genome.params);
  EXPECT_THROW(evolution::init_population(d, 1, 0), ConfigError);
}

TEST(SteadyState, SizeConstantAndBestMonotone) {
  const domains::ParityDomain d;
  auto pop = evolution::init_population(d, 20, 5);
  evolution::EvolutionConfig cfg;
  cfg.population_size = 20;
  Rng rng(6);
  double best = pop.members[pop.best_index()].fitness();
  for (int i = 0; i < 200; ++i) {
    EXPECT_EQ(evolution::steady_state_step(pop, d, config(Method::kSmgSum, 0.01), cfg, rng), 1u);
    EXPECT_EQ(pop.size(), 20u);
    const double now = pop.members[pop.best_index()].fitness();
    EXPECT_GE(now, best);
    best = now;
  }
  EXPECT_EQ(pop.evaluations_used, 220u);
}

TEST(SteadyState, RandomReplacementAlwaysInserts) {
  const domains::ToyDomain d(domains::ToyKind::kMedium);
  auto pop = evolution::init_population(d, 10, 1);
  evolution::EvolutionConfig cfg;
  cfg.population_size = 10;
  cfg.replacement = evolution::Replacement::kRandom;
  Rng rng(2);
  int accepted = 0;
  evolution::steady_state_step(pop, d, config(Method::kControl, 0.1), cfg, rng,
                               [&](const evolution::OffspringEvent& e) { accepted += e.accepted; });
  EXPECT_EQ(accepted, 1);
}

TEST(SteadyState, BatchedOffspringCountAsEvaluations) {
  const domains::ToyDomain d(domains::ToyKind::kMedium);
  auto pop = evolution::init_population(d, 10, 1);
  evolution::EvolutionConfig cfg;
  cfg.population_size = 10;
  cfg.offspring_batch = 4;
  Rng rng(2);
  EXPECT_EQ(evolution::steady_state_step(pop, d, config(Method::kControl, 0.1), cfg, rng), 4u);
  EXPECT_EQ(pop.evaluations_used, 14u);
}

TEST(RunEvolution, DeterministicWithinBudget) {
  const domains::ParityDomain d;
  evolution::EvolutionConfig cfg;
  cfg.population_size = 20;
  cfg.budget = 400;
  const auto a = evolution::run_evolution(d, config(Method::kControl, 0.05), cfg, 9);
  const auto b = evolution::run_evolution(d, config(Method::kControl, 0.05), cfg, 9);
  EXPECT_LE(a.evaluations_used, 400u);
  ASSERT_EQ(a.curve.size(), b.curve.size());
  for (std::size_t i = 0; i < a.curve.size(); ++i) {
    EXPECT_EQ(a.curve[i].best_fitness, b.curve[i].best_fitness);
    if (i > 0) EXPECT_GE(a.curve[i].best_fitness, a.curve[i - 1].best_fitness);
  }
  EXPECT_EQ(a.best.params, b.best.params);
  if (!a.solved) EXPECT_EQ(a.evaluations_used, 400u);
  EXPECT_EQ(a.curve.front().evaluation, 100u);
  EXPECT_THROW(evolution::run_evolution(d, config(Method::kControl, 0.05), {20, 5, 20}, 1), ConfigError);
}

TEST(RunEvolution, SolvedRunReportsEvaluationsWithinBudget) {
  const domains::ToyDomain d(domains::ToyKind::kEasy);
  evolution::EvolutionConfig cfg;
  cfg.population_size = 10;
  cfg.budget = 5000;
  const auto r = evolution::run_evolution(d, config(Method::kSmgAbs, 0.5), cfg, 3);
  ASSERT_TRUE(r.solved);
  ASSERT_TRUE(r.evaluations_to_solution.has_value());
  EXPECT_LE(*r.evaluations_to_solution, cfg.budget);
  EXPECT_EQ(*r.evaluations_to_solution, r.evaluations_used);
  ASSERT_TRUE(r.solution.has_value());
  EXPECT_TRUE(d.evaluate(r.solution->params).solved);
}

TEST(HillClimber, MonotoneDeterministicExactIterations) {
  const domains::ToyDomain d(domains::ToyKind::kWashout);
  const auto a = evolution::run_hillclimber(d, config(Method::kSmgAbs, 0.5), 300, 4);
  const auto b = evolution::run_hillclimber(d, config(Method::kSmgAbs, 0.5), 300, 4);
  ASSERT_EQ(a.curve.size(), 300u);
  for (std::size_t i = 0; i < a.curve.size(); ++i) {
    EXPECT_EQ(a.curve[i].best_fitness, b.curve[i].best_fitness);
    if (i > 0) EXPECT_GE(a.curve[i].best_fitness, a.curve[i - 1].best_fitness);
  }
  EXPECT_EQ(a.evaluations_used, 301u);
  EXPECT_THROW(evolution::run_hillclimber(d, config(Method::kSmgAbs, 0.5), 0, 4), ConfigError);
}
