#include "safemut/net/architectures.hpp"

#include <string>

#include "safemut/errors.hpp"

namespace safemut::net {

using ad::Activation;
using ad::ArchitectureSpec;
using ad::DenseLayer;
using ad::DiagonalLayer;
using ad::RecurrentLayer;
using ad::ResidualBlock;

ArchitectureSpec build_parity_net() {
  ArchitectureSpec arch{"parity", 1, 1, {}};
  arch.layers.emplace_back(RecurrentLayer{1, 20, Activation::kTanh});
  arch.layers.emplace_back(RecurrentLayer{20, 20, Activation::kTanh});
  arch.layers.emplace_back(DenseLayer{20, 1, Activation::kSigmoid});
  return arch;
}

ArchitectureSpec build_maze_net() {
  constexpr std::size_t kHidden = 16;
  constexpr std::size_t kWidth = 8;
  ArchitectureSpec arch{"maze", kMazeInputWidth, kMazeOutputWidth, {}};
  arch.layers.emplace_back(DenseLayer{kMazeInputWidth, kWidth, Activation::kSelu});
  for (std::size_t i = 1; i < kHidden; ++i) {
    arch.layers.emplace_back(DenseLayer{kWidth, kWidth, Activation::kSelu});
  }
  arch.layers.emplace_back(DenseLayer{kWidth, kMazeOutputWidth, Activation::kSigmoid});
  return arch;
}

ArchitectureSpec build_residual_net(std::size_t depth) {
  std::size_t width = 0;
  if (depth == 32 || depth == 64) {
    width = 125;
  } else if (depth == 101) {
    width = 48;
  } else {
    throw ConfigError("residual depth must be 32, 64 or 101, got " + std::to_string(depth));
  }
  constexpr std::size_t kSkipPeriod = 4;
  ArchitectureSpec arch{"residual" + std::to_string(depth), kMazeInputWidth, kMazeOutputWidth, {}};
  // Input projection, then skip blocks, then plain layers for the remainder.
  arch.layers.emplace_back(DenseLayer{kMazeInputWidth, width, Activation::kTanh});
  const std::size_t blocks = (depth - 1) / kSkipPeriod;
  for (std::size_t b = 0; b < blocks; ++b) {
    arch.layers.emplace_back(ResidualBlock{width, Activation::kTanh, kSkipPeriod});
  }
  for (std::size_t i = 1 + blocks * kSkipPeriod; i < depth; ++i) {
    arch.layers.emplace_back(DenseLayer{width, width, Activation::kTanh});
  }
  arch.layers.emplace_back(DenseLayer{width, kMazeOutputWidth, Activation::kSigmoid});
  return arch;
}

ArchitectureSpec build_toy_net() {
  ArchitectureSpec arch{"toy", 2, 2, {}};
  arch.layers.emplace_back(DiagonalLayer{{100.0, 0.1}});
  return arch;
}

ArchitectureSpec build_linear_net() {
  ArchitectureSpec arch{"linear", 1, 1, {}};
  arch.layers.emplace_back(DenseLayer{1, 1, Activation::kIdentity, false});
  return arch;
}

ArchitectureSpec architecture_by_id(std::string_view id) {
  if (id == "parity") return build_parity_net();
  if (id == "maze") return build_maze_net();
  if (id == "residual32") return build_residual_net(32);
  if (id == "residual64") return build_residual_net(64);
  if (id == "residual101") return build_residual_net(101);
  if (id == "toy") return build_toy_net();
  if (id == "linear") return build_linear_net();
  throw ConfigError("unknown architecture id '" + std::string(id) + "'");
}

}  // namespace safemut::net
