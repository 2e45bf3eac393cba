#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "safemut/ad/tape.hpp"
#include "safemut/ad/tensor.hpp"

namespace safemut::ad {

/// Reverse mode: sum over rows, timesteps and output units of seed-weighted
/// output gradients with respect to every parameter. Recurrent tapes are
/// differentiated through the full unroll (BPTT). seed must have the shape
/// of tape.output_values().
std::vector<double> vjp(const Tape& tape, const SequenceBatch& seed);

/// Same as vjp, but the parameter gradient of every batch row is kept
/// separate and handed to visit(row, gradient) in row order. The span is
/// only valid during the call.
void vjp_per_row(const Tape& tape, const SequenceBatch& seed,
                 const std::function<void(std::size_t, std::span<const double>)>& visit);

/// Forward mode: J * tangent for the Jacobian of all outputs with respect to
/// all parameters, shaped like tape.output_values().
SequenceBatch jvp(const Tape& tape, std::span<const double> tangent);

}  // namespace safemut::ad
