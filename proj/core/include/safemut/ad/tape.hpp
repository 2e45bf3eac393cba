#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "safemut/ad/architecture.hpp"
#include "safemut/ad/param_vector.hpp"
#include "safemut/ad/tensor.hpp"

namespace safemut::ad {

using NodeId = std::size_t;
inline constexpr std::size_t kNoParams = std::numeric_limits<std::size_t>::max();

enum class Op : std::uint8_t { kInput, kState, kAffine, kActivate, kAdd, kScale, kConcat, kSlice };

std::string_view to_string(Op op);

struct AffineTerm {
  NodeId operand = 0;
  std::size_t weight_offset = 0;  // operand.width x node.width block, row-major
};

struct Node {
  Op op = Op::kInput;
  std::size_t width = 0;
  std::vector<AffineTerm> terms;   // kAffine
  std::vector<NodeId> operands;    // kActivate, kAdd, kScale, kConcat, kSlice
  std::size_t bias_offset = kNoParams;
  std::size_t param_offset = kNoParams;  // kScale weights
  std::vector<double> coefficients;      // kScale
  Activation activation = Activation::kIdentity;
  std::size_t slice_begin = 0;
};

/// Recorded computation over a batch of independent rows. Nodes are
/// evaluated eagerly as they are appended, so the node list is always in
/// topological order. Every primitive acts row by row with a fixed
/// summation order: a row's value does not depend on the batch it sits in.
class Tape {
 public:
  Tape(ParamVector params, std::size_t batch);

  NodeId input(const Matrix& value);
  /// Externally set node, zero on creation (recurrent initial state).
  NodeId state(std::size_t width);
  NodeId affine(std::span<const AffineTerm> terms, std::size_t bias_offset, std::size_t width);
  NodeId activate(NodeId x, Activation activation);
  NodeId add(NodeId a, NodeId b);
  NodeId scale(NodeId x, std::size_t param_offset, std::vector<double> coefficients);
  NodeId concat(std::span<const NodeId> parts);
  NodeId slice(NodeId x, std::size_t begin, std::size_t width);

  /// Appends to the ordered output list (one entry per timestep for unrolled nets).
  void mark_output(NodeId id);

  /// Overwrites an input or state node. Call reevaluate() afterwards.
  void set_value(NodeId id, const Matrix& value);
  /// Recomputes every derived node from the current input/state values.
  void reevaluate();

  /// Recomputes all nodes into fresh storage and returns the output values.
  /// Bit-identical to outputs() under fixed floating point settings.
  std::vector<Matrix> replay() const;

  std::size_t batch() const { return batch_; }
  std::size_t size() const { return nodes_.size(); }
  const Node& node(NodeId id) const { return nodes_[id]; }
  const Matrix& value(NodeId id) const { return values_[id]; }
  const ParamVector& params() const { return params_; }
  std::size_t param_count() const { return params_.size(); }
  const std::vector<NodeId>& inputs() const { return inputs_; }
  const std::vector<NodeId>& outputs() const { return outputs_; }

  /// Current values of the output nodes, in output order.
  SequenceBatch output_values() const;

 private:
  NodeId append(Node node);
  void check_operand(NodeId id) const;
  void evaluate(NodeId id, std::vector<Matrix>& values) const;

  ParamVector params_;
  std::size_t batch_;
  std::vector<Node> nodes_;
  std::vector<Matrix> values_;
  std::vector<NodeId> inputs_;
  std::vector<NodeId> outputs_;
};

double activate_value(Activation a, double x);
/// d act / d x given the pre-activation x and the activation output y.
double activation_derivative(Activation a, double x, double y);

}  // namespace safemut::ad
