#include "safemut/net/init.hpp"

#include <cmath>

namespace safemut::net {

ad::ParamVector xavier_init(const ad::ArchitectureSpec& arch, Rng& rng) {
  ad::ParamVector params(ad::param_count(arch));
  for (const auto& block : ad::param_layout(arch)) {
    if (block.role == ad::BlockRole::kBias) continue;
    const double fan_sum = block.role == ad::BlockRole::kScale
                               ? 2.0
                               : static_cast<double>(block.rows + block.cols);
    const double bound = std::sqrt(6.0 / fan_sum);
    std::uniform_real_distribution<double> uniform(-bound, bound);
    for (std::size_t i = 0; i < block.size(); ++i) params[block.offset + i] = uniform(rng);
  }
  return params;
}

}  // namespace safemut::net
