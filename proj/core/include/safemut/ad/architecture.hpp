#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace safemut::ad {

enum class Activation { kIdentity, kTanh, kSelu, kSigmoid };

std::string_view to_string(Activation a);
/// Accepts "identity", "tanh", "selu", "sigmoid". Throws ConfigError otherwise.
Activation parse_activation(std::string_view name);

/// Fully connected layer: y = act(x W + b).
struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  Activation activation = Activation::kIdentity;
  bool bias = true;
};

/// Vanilla recurrent layer: h_t = act(x_t W_in + h_{t-1} W_rec + b), h_{-1} = 0.
struct RecurrentLayer {
  std::size_t in = 0;
  std::size_t units = 0;
  Activation activation = Activation::kTanh;
};

/// skip_period dense layers of equal width whose output is added to the
/// block input after the last activation.
struct ResidualBlock {
  std::size_t width = 0;
  Activation activation = Activation::kTanh;
  std::size_t skip_period = 4;
};

/// Elementwise y_j = c_j * w_j * x_j with fixed coefficients c and one
/// evolvable weight per unit.
struct DiagonalLayer {
  std::vector<double> coefficients;
};

using Layer = std::variant<DenseLayer, RecurrentLayer, ResidualBlock, DiagonalLayer>;

struct ArchitectureSpec {
  std::string id;
  std::size_t input_width = 0;
  std::size_t output_width = 0;
  std::vector<Layer> layers;

  bool is_recurrent() const;
};

std::size_t layer_input_width(const Layer& layer);
std::size_t layer_output_width(const Layer& layer);

/// Throws ConfigError unless every layer width chains from input_width to output_width.
void validate(const ArchitectureSpec& arch);

enum class BlockRole { kWeight, kRecurrentWeight, kBias, kScale };

/// One contiguous slice of the flat parameter vector. Weight blocks are
/// stored row-major with rows indexing inputs (fan-in) and columns indexing
/// outputs; bias and scale blocks are a single row.
struct ParamBlock {
  std::size_t layer = 0;
  std::size_t sublayer = 0;
  BlockRole role = BlockRole::kWeight;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t offset = 0;

  std::size_t size() const { return rows * cols; }
  std::size_t index(std::size_t row, std::size_t col) const { return offset + row * cols + col; }
};

/// Blocks in flat order. Per layer: dense W, b; recurrent W_in, W_rec, b;
/// residual (W, b) per sublayer; diagonal w.
std::vector<ParamBlock> param_layout(const ArchitectureSpec& arch);

std::size_t param_count(const ArchitectureSpec& arch);

}  // namespace safemut::ad
