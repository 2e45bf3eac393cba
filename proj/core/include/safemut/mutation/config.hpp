#pragma once

#include <string>
#include <string_view>

namespace safemut::mutation {

enum class Method { kControl, kSmR, kSmgAbs, kSmgSum, kSmgSo };

std::string_view to_string(Method m);
/// Accepts "control", "SM-R", "SM-G-ABS", "SM-G-SUM", "SM-G-SO" (case-insensitive).
Method parse_method(std::string_view name);
bool is_gradient_method(Method m);

struct LineSearchConfig {
  double initial_magnitude = 1.0;
  int max_doublings = 40;
  int max_iters = 30;
  double rel_tol = 0.05;
};

struct MutationConfig {
  Method method = Method::kControl;
  /// Gaussian sigma for every method except SM-R, where it is the target divergence.
  double strength = 0.01;
  double epsilon_clamp = 1e-8;
  LineSearchConfig line_search;
  /// Compute the realized divergence of every offspring for the report.
  bool measure_divergence = true;

  /// Throws ConfigError unless strength > 0 and the numeric knobs are sane.
  void validate() const;
};

}  // namespace safemut::mutation
