#include "safemut/mutation/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "safemut/errors.hpp"

namespace safemut::mutation {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::kControl: return "control";
    case Method::kSmR: return "SM-R";
    case Method::kSmgAbs: return "SM-G-ABS";
    case Method::kSmgSum: return "SM-G-SUM";
    case Method::kSmgSo: return "SM-G-SO";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  std::replace(upper.begin(), upper.end(), '_', '-');
  if (upper == "CONTROL") return Method::kControl;
  if (upper == "SM-R") return Method::kSmR;
  if (upper == "SM-G-ABS") return Method::kSmgAbs;
  if (upper == "SM-G-SUM") return Method::kSmgSum;
  if (upper == "SM-G-SO") return Method::kSmgSo;
  throw ConfigError("unknown mutation method '" + std::string(name) + "'");
}

bool is_gradient_method(Method m) {
  return m == Method::kSmgAbs || m == Method::kSmgSum || m == Method::kSmgSo;
}

void MutationConfig::validate() const {
  if (!(strength > 0.0) || !std::isfinite(strength)) {
    throw ConfigError("mutation strength must be a positive finite number");
  }
  if (!(epsilon_clamp > 0.0)) throw ConfigError("epsilon_clamp must be positive");
  if (!(line_search.initial_magnitude > 0.0)) throw ConfigError("line search initial magnitude must be positive");
  if (!(line_search.rel_tol > 0.0)) throw ConfigError("line search rel_tol must be positive");
  if (line_search.max_doublings < 0 || line_search.max_iters < 0) {
    throw ConfigError("line search iteration caps must be non-negative");
  }
}

}  // namespace safemut::mutation
