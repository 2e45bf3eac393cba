#pragma once

#include <span>
#include <vector>

#include "safemut/ad/architecture.hpp"
#include "safemut/ad/param_vector.hpp"
#include "safemut/ad/tape.hpp"
#include "safemut/ad/tensor.hpp"

namespace safemut::ad {

struct ForwardResult {
  SequenceBatch outputs;
  Tape tape;
};

/// Unrolls the network over every timestep of the batch, threading
/// recurrent state from zeros. Throws ConfigError on shape mismatch and
/// NumericError on a non-finite intermediate value.
ForwardResult forward(const ArchitectureSpec& arch, const ParamVector& params,
                      const SequenceBatch& inputs);

/// Single sequence convenience overload; returns one output vector per step.
std::vector<std::vector<double>> forward(const ArchitectureSpec& arch, const ParamVector& params,
                                         const std::vector<std::vector<double>>& sequence);

/// Runs a network one timestep at a time for a single row, keeping recurrent
/// state between calls. Produces exactly the bits forward() produces for
/// the same sequence.
class StepRunner {
 public:
  StepRunner(const ArchitectureSpec& arch, const ParamVector& params);

  std::span<const double> step(std::span<const double> input);
  void reset();

 private:
  Tape tape_;
  NodeId input_;
  NodeId output_;
  std::vector<std::pair<NodeId, NodeId>> recurrences_;  // (state node, new hidden node)
  Matrix scratch_;
};

}  // namespace safemut::ad
