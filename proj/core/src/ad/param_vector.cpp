#include "safemut/ad/param_vector.hpp"

#include "safemut/errors.hpp"

namespace safemut::ad {

ParamVector add(const ParamVector& params, std::span<const double> delta) {
  if (delta.size() != params.size()) {
    throw ConfigError("perturbation length " + std::to_string(delta.size()) +
                      " != parameter count " + std::to_string(params.size()));
  }
  std::vector<double> out(params.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = params[i] + delta[i];
  return ParamVector(std::move(out));
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ConfigError("dot: length mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

}  // namespace safemut::ad
