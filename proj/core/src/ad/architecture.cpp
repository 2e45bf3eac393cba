#include "safemut/ad/architecture.hpp"

#include <string>

#include "safemut/errors.hpp"

namespace safemut::ad {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::kIdentity: return "identity";
    case Activation::kTanh: return "tanh";
    case Activation::kSelu: return "selu";
    case Activation::kSigmoid: return "sigmoid";
  }
  return "?";
}

Activation parse_activation(std::string_view name) {
  if (name == "identity") return Activation::kIdentity;
  if (name == "tanh") return Activation::kTanh;
  if (name == "selu") return Activation::kSelu;
  if (name == "sigmoid") return Activation::kSigmoid;
  throw ConfigError("unknown activation '" + std::string(name) + "'");
}

bool ArchitectureSpec::is_recurrent() const {
  for (const auto& l : layers) {
    if (std::holds_alternative<RecurrentLayer>(l)) return true;
  }
  return false;
}

std::size_t layer_input_width(const Layer& layer) {
  return std::visit(overloaded{
                        [](const DenseLayer& d) { return d.in; },
                        [](const RecurrentLayer& r) { return r.in; },
                        [](const ResidualBlock& b) { return b.width; },
                        [](const DiagonalLayer& g) { return g.coefficients.size(); },
                    },
                    layer);
}

std::size_t layer_output_width(const Layer& layer) {
  return std::visit(overloaded{
                        [](const DenseLayer& d) { return d.out; },
                        [](const RecurrentLayer& r) { return r.units; },
                        [](const ResidualBlock& b) { return b.width; },
                        [](const DiagonalLayer& g) { return g.coefficients.size(); },
                    },
                    layer);
}

void validate(const ArchitectureSpec& arch) {
  if (arch.layers.empty()) throw ConfigError("architecture '" + arch.id + "' has no layers");
  std::size_t width = arch.input_width;
  for (std::size_t i = 0; i < arch.layers.size(); ++i) {
    const auto& layer = arch.layers[i];
    if (layer_input_width(layer) != width) {
      throw ConfigError("architecture '" + arch.id + "': layer " + std::to_string(i) +
                        " expects width " + std::to_string(layer_input_width(layer)) +
                        " but receives " + std::to_string(width));
    }
    if (layer_output_width(layer) == 0) {
      throw ConfigError("architecture '" + arch.id + "': layer " + std::to_string(i) + " is empty");
    }
    if (const auto* block = std::get_if<ResidualBlock>(&layer); block && block->skip_period == 0) {
      throw ConfigError("residual block needs skip_period >= 1");
    }
    width = layer_output_width(layer);
  }
  if (width != arch.output_width) {
    throw ConfigError("architecture '" + arch.id + "': last layer width " + std::to_string(width) +
                      " != output width " + std::to_string(arch.output_width));
  }
}

std::vector<ParamBlock> param_layout(const ArchitectureSpec& arch) {
  std::vector<ParamBlock> blocks;
  std::size_t offset = 0;
  auto push = [&](std::size_t layer, std::size_t sub, BlockRole role, std::size_t rows,
                  std::size_t cols) {
    blocks.push_back({layer, sub, role, rows, cols, offset});
    offset += rows * cols;
  };
  for (std::size_t i = 0; i < arch.layers.size(); ++i) {
    std::visit(overloaded{
                   [&](const DenseLayer& d) {
                     push(i, 0, BlockRole::kWeight, d.in, d.out);
                     if (d.bias) push(i, 0, BlockRole::kBias, 1, d.out);
                   },
                   [&](const RecurrentLayer& r) {
                     push(i, 0, BlockRole::kWeight, r.in, r.units);
                     push(i, 0, BlockRole::kRecurrentWeight, r.units, r.units);
                     push(i, 0, BlockRole::kBias, 1, r.units);
                   },
                   [&](const ResidualBlock& b) {
                     for (std::size_t s = 0; s < b.skip_period; ++s) {
                       push(i, s, BlockRole::kWeight, b.width, b.width);
                       push(i, s, BlockRole::kBias, 1, b.width);
                     }
                   },
                   [&](const DiagonalLayer& g) {
                     push(i, 0, BlockRole::kScale, 1, g.coefficients.size());
                   },
               },
               arch.layers[i]);
  }
  return blocks;
}

std::size_t param_count(const ArchitectureSpec& arch) {
  std::size_t n = 0;
  for (const auto& b : param_layout(arch)) n += b.size();
  return n;
}

}  // namespace safemut::ad
