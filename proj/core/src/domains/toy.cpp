#include "safemut/domains/toy.hpp"

#include <string>

#include "safemut/ad/forward.hpp"
#include "safemut/errors.hpp"
#include "safemut/net/architectures.hpp"

namespace safemut::domains {

std::string_view to_string(ToyKind kind) {
  switch (kind) {
    case ToyKind::kEasy: return "easy";
    case ToyKind::kMedium: return "medium";
    case ToyKind::kWashout: return "washout";
  }
  return "?";
}

ToyKind parse_toy_kind(std::string_view name) {
  if (name == "easy") return ToyKind::kEasy;
  if (name == "medium") return ToyKind::kMedium;
  if (name == "washout") return ToyKind::kWashout;
  throw ConfigError("unknown toy task '" + std::string(name) + "'");
}

ToyTask ToyTask::make(ToyKind kind) {
  switch (kind) {
    case ToyKind::kEasy: return {kind, {{{0.0, 1.0}, {0.0, 1.0}}}};
    case ToyKind::kMedium: return {kind, {{{1.0, 1.0}, {1.0, 1.0}}}};
    case ToyKind::kWashout: return {kind, {{{1.0, 1.0}, {1.0, 1.0}}, {{-1.0, -1.0}, {-1.0, -1.0}}}};
  }
  throw ConfigError("unknown toy task");
}

evolution::EvalRecord toy_eval(const ToyTask& task, const ad::ParamVector& params) {
  static const ad::ArchitectureSpec arch = net::build_toy_net();
  std::vector<std::vector<double>> rows;
  for (const auto& ex : task.examples) rows.push_back({ex.input[0], ex.input[1]});
  auto inputs = ad::SequenceBatch::from_rows(rows);
  auto fwd = ad::forward(arch, params, inputs);

  double error = 0.0;
  const ad::Matrix& y = fwd.outputs.step(0);
  for (std::size_t i = 0; i < task.examples.size(); ++i) {
    for (std::size_t k = 0; k < 2; ++k) {
      const double d = y(i, k) - task.examples[i].target[k];
      error += d * d;
    }
  }
  evolution::EvalRecord record;
  record.fitness = -error;
  record.solved = error <= kToySolvedError;
  record.archive = {std::move(inputs), std::move(fwd.outputs)};
  return record;
}

ToyDomain::ToyDomain(ToyKind kind) : task_(ToyTask::make(kind)), arch_(net::build_toy_net()) {}

std::string ToyDomain::name() const { return "toy_" + std::string(to_string(task_.kind)); }

evolution::EvalRecord ToyDomain::evaluate(const ad::ParamVector& params) const {
  return toy_eval(task_, params);
}

double ToyDomain::normalized_fitness(double fitness) const { return 1.0 / (1.0 - fitness); }

}  // namespace safemut::domains
