#pragma once

#include <cstddef>

#include "safemut/ad/tensor.hpp"

namespace safemut::mutation {

/// Inputs a parent saw during evaluation and the outputs it produced.
/// Feed-forward domains store one experience per batch row of a length-1
/// batch; recurrent domains store one input sequence per row.
struct ExperienceArchive {
  ad::SequenceBatch inputs;
  ad::SequenceBatch outputs;

  /// Number of experiences (I).
  std::size_t size() const { return inputs.batch(); }
  bool empty() const { return size() == 0; }
};

/// Keeps at most cap rows, picked at evenly spaced indices (first row always kept).
ExperienceArchive subsample(const ExperienceArchive& archive, std::size_t cap);

}  // namespace safemut::mutation
