#include "safemut/domains/parity.hpp"

#include <cmath>
#include <string>

#include "safemut/ad/forward.hpp"
#include "safemut/errors.hpp"
#include "safemut/net/architectures.hpp"

namespace safemut::domains {

const std::array<std::array<int, kParityBits>, kParityCases>& parity_sequences() {
  static const auto table = [] {
    std::array<std::array<int, kParityBits>, kParityCases> t{};
    for (std::size_t i = 0; i < kParityCases; ++i) {
      for (std::size_t b = 0; b < kParityBits; ++b) t[i][b] = static_cast<int>((i >> (kParityBits - 1 - b)) & 1U);
    }
    return t;
  }();
  return table;
}

int parity_of(const std::array<int, kParityBits>& bits) {
  int ones = 0;
  for (int b : bits) ones += b;
  return ones % 2;
}

std::string_view to_string(ParityFitness f) { return f == ParityFitness::kCount ? "count" : "graded"; }

ParityFitness parse_parity_fitness(std::string_view name) {
  if (name == "count") return ParityFitness::kCount;
  if (name == "graded") return ParityFitness::kGraded;
  throw ConfigError("unknown parity fitness '" + std::string(name) + "' (expected count or graded)");
}

ParityEval parity_eval(const ad::ArchitectureSpec& arch, const ad::ParamVector& params, ParityFitness fitness) {
  if (arch.input_width != 1 || arch.output_width != 1) {
    throw ConfigError("parity needs a network with one input and one output");
  }
  const auto& seqs = parity_sequences();
  ad::SequenceBatch inputs(kParityBits, kParityCases, 1);
  for (std::size_t i = 0; i < kParityCases; ++i) {
    for (std::size_t t = 0; t < kParityBits; ++t) inputs.step(t)(i, 0) = seqs[i][t];
  }
  auto fwd = ad::forward(arch, params, inputs);

  std::size_t correct = 0;
  double sq_err = 0.0;
  const ad::Matrix& last = fwd.outputs.step(kParityBits - 1);
  for (std::size_t i = 0; i < kParityCases; ++i) {
    const int target = parity_of(seqs[i]);
    const int predicted = last(i, 0) > 0.5 ? 1 : 0;
    if (predicted == target) ++correct;
    const double e = last(i, 0) - target;
    sq_err += e * e;
  }
  ParityEval out;
  out.correct = correct;
  // The mean squared error of a sigmoid output is below 1, so graded
  // fitness stays within (correct - 1, correct].
  out.record.fitness = static_cast<double>(correct);
  if (fitness == ParityFitness::kGraded) out.record.fitness -= sq_err / static_cast<double>(kParityCases);
  out.record.solved = correct == kParityCases;
  out.record.archive = {std::move(inputs), std::move(fwd.outputs)};
  return out;
}

ParityDomain::ParityDomain() : ParityDomain(net::build_parity_net()) {}

ParityDomain::ParityDomain(ad::ArchitectureSpec arch, ParityFitness fitness)
    : arch_(std::move(arch)), fitness_(fitness) {
  ad::validate(arch_);
}

evolution::EvalRecord ParityDomain::evaluate(const ad::ParamVector& params) const {
  return parity_eval(arch_, params, fitness_).record;
}

double ParityDomain::normalized_fitness(double fitness) const {
  return std::ceil(fitness) / static_cast<double>(kParityCases);
}

}  // namespace safemut::domains
