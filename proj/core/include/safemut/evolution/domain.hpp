#pragma once

#include <string>
#include <vector>

#include "safemut/ad/architecture.hpp"
#include "safemut/ad/param_vector.hpp"
#include "safemut/mutation/archive.hpp"

namespace safemut::evolution {

/// Outcome of one rollout of one genome.
struct EvalRecord {
  double fitness = 0.0;
  bool solved = false;
  mutation::ExperienceArchive archive;
  std::vector<double> aux;  // domain payload, e.g. the final robot pose
};

/// An evaluation environment. Implementations are immutable after
/// construction and evaluate() is safe to call concurrently.
class Domain {
 public:
  virtual ~Domain() = default;

  virtual std::string name() const = 0;
  virtual const ad::ArchitectureSpec& architecture() const = 0;
  virtual EvalRecord evaluate(const ad::ParamVector& params) const = 0;
  /// Maps a fitness onto [0, 1], 1 being a solution.
  virtual double normalized_fitness(double fitness) const = 0;
};

}  // namespace safemut::evolution
