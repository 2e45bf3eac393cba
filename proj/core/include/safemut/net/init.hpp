#pragma once

#include "safemut/ad/architecture.hpp"
#include "safemut/ad/param_vector.hpp"
#include "safemut/random.hpp"

namespace safemut::net {

/// Uniform Glorot: every weight block draws from U(-a, a) with
/// a = sqrt(6 / (fan_in + fan_out)) of that block; biases are zero.
/// Diagonal scale weights use fan_in = fan_out = 1.
ad::ParamVector xavier_init(const ad::ArchitectureSpec& arch, Rng& rng);

}  // namespace safemut::net
