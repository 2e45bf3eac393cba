#pragma once

#include <span>

namespace safemut::harness {

struct MannWhitney {
  /// U of the first sample: pairs (a, b) with a > b, ties counting one half.
  double u_a = 0.0;
  double u_b = 0.0;
  double z = 0.0;
  /// Two-sided, normal approximation with tie and continuity correction.
  double p = 1.0;
  /// Every pooled value identical; p is 1.
  bool degenerate = false;
};

/// Throws ConfigError when either sample is empty.
MannWhitney mann_whitney_u(std::span<const double> a, std::span<const double> b);

}  // namespace safemut::harness
