#pragma once

#include <cstddef>
#include <string_view>

#include "safemut/ad/architecture.hpp"

namespace safemut::net {

/// Maze controllers see the current and the previous sensor frame.
inline constexpr std::size_t kMazeSensorCount = 10;
inline constexpr std::size_t kMazeInputWidth = 2 * kMazeSensorCount;
inline constexpr std::size_t kMazeOutputWidth = 2;

/// 1 input, two stacked recurrent layers of 20 tanh units, 1 sigmoid output.
ad::ArchitectureSpec build_parity_net();

/// 20 inputs, 16 SELU hidden layers of 8 units, 2 sigmoid outputs. 1,266 parameters.
ad::ArchitectureSpec build_maze_net();

/// Deep tanh controller for the maze with identity skips every four layers.
/// depth 32 or 64 uses width 125, depth 101 uses width 48. Throws
/// ConfigError for any other depth.
ad::ArchitectureSpec build_residual_net(std::size_t depth);

/// y0 = 100 w0 x0, y1 = 0.1 w1 x1.
ad::ArchitectureSpec build_toy_net();

/// y = w x, one weight, no bias.
ad::ArchitectureSpec build_linear_net();

/// Resolves "parity", "maze", "residual32", "residual64", "residual101",
/// "toy" and "linear".
ad::ArchitectureSpec architecture_by_id(std::string_view id);

}  // namespace safemut::net
