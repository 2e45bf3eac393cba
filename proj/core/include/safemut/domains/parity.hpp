#pragma once

#include <array>
#include <string_view>
#include <vector>

#include "safemut/evolution/domain.hpp"

namespace safemut::domains {

inline constexpr std::size_t kParityBits = 4;
inline constexpr std::size_t kParityCases = 16;

/// All 4-bit sequences, row i holding the bits of i (most significant first).
const std::array<std::array<int, kParityBits>, kParityCases>& parity_sequences();

/// 1 when the sequence holds an odd number of ones.
int parity_of(const std::array<int, kParityBits>& bits);

/// kCount scores the number of correct sequences. kGraded subtracts the
/// mean squared error of the final outputs, which breaks ties between
/// equally accurate networks; its solutions are exactly the kCount ones.
enum class ParityFitness { kCount, kGraded };

std::string_view to_string(ParityFitness f);
ParityFitness parse_parity_fitness(std::string_view name);

struct ParityEval {
  evolution::EvalRecord record;
  std::size_t correct = 0;
};

/// Feeds each sequence one bit per timestep and reads the final output
/// (odd when > 0.5). Solved at 16 correct.
ParityEval parity_eval(const ad::ArchitectureSpec& arch, const ad::ParamVector& params,
                       ParityFitness fitness = ParityFitness::kCount);

class ParityDomain final : public evolution::Domain {
 public:
  ParityDomain();
  explicit ParityDomain(ad::ArchitectureSpec arch, ParityFitness fitness = ParityFitness::kCount);

  std::string name() const override { return "parity"; }
  const ad::ArchitectureSpec& architecture() const override { return arch_; }
  evolution::EvalRecord evaluate(const ad::ParamVector& params) const override;
  /// Correct fraction; graded fitness is floored to its count first.
  double normalized_fitness(double fitness) const override;

  ParityFitness fitness_kind() const { return fitness_; }

 private:
  ad::ArchitectureSpec arch_;
  ParityFitness fitness_;
};

}  // namespace safemut::domains
