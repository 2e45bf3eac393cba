#include "safemut/ad/forward.hpp"

#include <string>

#include "safemut/errors.hpp"

namespace safemut::ad {

namespace {

struct StepGraph {
  NodeId output = 0;
  std::vector<NodeId> hidden;  // new recurrent hidden node per recurrent layer, in layer order
};

NodeId dense(Tape& tape, NodeId x, const ParamBlock& w, const ParamBlock* b, Activation act) {
  const AffineTerm term{x, w.offset};
  NodeId h = tape.affine({&term, 1}, b ? b->offset : kNoParams, w.cols);
  return act == Activation::kIdentity ? h : tape.activate(h, act);
}

/// Appends one timestep of the network. prev_states holds the previous
/// hidden node of every recurrent layer, in layer order.
StepGraph append_step(Tape& tape, const ArchitectureSpec& arch, const std::vector<ParamBlock>& layout,
                      NodeId x, const std::vector<NodeId>& prev_states) {
  StepGraph g;
  std::size_t block = 0;
  std::size_t recurrent = 0;
  NodeId h = x;
  for (const auto& layer : arch.layers) {
    if (const auto* d = std::get_if<DenseLayer>(&layer)) {
      const ParamBlock& w = layout[block++];
      const ParamBlock* b = d->bias ? &layout[block++] : nullptr;
      h = dense(tape, h, w, b, d->activation);
    } else if (const auto* r = std::get_if<RecurrentLayer>(&layer)) {
      const ParamBlock& w_in = layout[block++];
      const ParamBlock& w_rec = layout[block++];
      const ParamBlock& b = layout[block++];
      const AffineTerm terms[] = {{h, w_in.offset}, {prev_states[recurrent], w_rec.offset}};
      h = tape.affine(terms, b.offset, r->units);
      if (r->activation != Activation::kIdentity) h = tape.activate(h, r->activation);
      g.hidden.push_back(h);
      ++recurrent;
    } else if (const auto* res = std::get_if<ResidualBlock>(&layer)) {
      const NodeId skip = h;
      for (std::size_t s = 0; s < res->skip_period; ++s) {
        const ParamBlock& w = layout[block++];
        const ParamBlock& b = layout[block++];
        h = dense(tape, h, w, &b, res->activation);
      }
      h = tape.add(h, skip);
    } else if (const auto* diag = std::get_if<DiagonalLayer>(&layer)) {
      const ParamBlock& w = layout[block++];
      h = tape.scale(h, w.offset, diag->coefficients);
    }
  }
  g.output = h;
  return g;
}

std::vector<std::size_t> recurrent_widths(const ArchitectureSpec& arch) {
  std::vector<std::size_t> widths;
  for (const auto& layer : arch.layers) {
    if (const auto* r = std::get_if<RecurrentLayer>(&layer)) widths.push_back(r->units);
  }
  return widths;
}

void check_params(const ArchitectureSpec& arch, const ParamVector& params) {
  validate(arch);
  const std::size_t expected = param_count(arch);
  if (params.size() != expected) {
    throw ConfigError("architecture '" + arch.id + "' has " + std::to_string(expected) +
                      " parameters, got " + std::to_string(params.size()));
  }
}

}  // namespace

ForwardResult forward(const ArchitectureSpec& arch, const ParamVector& params,
                      const SequenceBatch& inputs) {
  check_params(arch, params);
  if (inputs.length() == 0) throw ConfigError("forward: empty input sequence");
  if (inputs.width() != arch.input_width) {
    throw ConfigError("forward: input width " + std::to_string(inputs.width()) +
                      " != architecture input width " + std::to_string(arch.input_width));
  }
  const auto layout = param_layout(arch);
  Tape tape(params, inputs.batch());
  std::vector<NodeId> states;
  for (std::size_t w : recurrent_widths(arch)) states.push_back(tape.state(w));
  for (std::size_t t = 0; t < inputs.length(); ++t) {
    const NodeId x = tape.input(inputs.step(t));
    StepGraph g = append_step(tape, arch, layout, x, states);
    tape.mark_output(g.output);
    states = std::move(g.hidden);
  }
  SequenceBatch outputs = tape.output_values();
  return {std::move(outputs), std::move(tape)};
}

std::vector<std::vector<double>> forward(const ArchitectureSpec& arch, const ParamVector& params,
                                         const std::vector<std::vector<double>>& sequence) {
  const auto result = forward(arch, params, SequenceBatch::from_sequence(sequence));
  std::vector<std::vector<double>> out;
  for (const auto& step : result.outputs.steps()) {
    out.emplace_back(step.flat().begin(), step.flat().end());
  }
  return out;
}

StepRunner::StepRunner(const ArchitectureSpec& arch, const ParamVector& params)
    : tape_((check_params(arch, params), params), 1), scratch_(1, arch.input_width) {
  const auto layout = param_layout(arch);
  std::vector<NodeId> states;
  for (std::size_t w : recurrent_widths(arch)) states.push_back(tape_.state(w));
  input_ = tape_.input(scratch_);
  StepGraph g = append_step(tape_, arch, layout, input_, states);
  output_ = g.output;
  for (std::size_t i = 0; i < states.size(); ++i) recurrences_.emplace_back(states[i], g.hidden[i]);
}

std::span<const double> StepRunner::step(std::span<const double> input) {
  if (input.size() != scratch_.cols()) throw ConfigError("step: input width mismatch");
  std::copy(input.begin(), input.end(), scratch_.data());
  tape_.set_value(input_, scratch_);
  tape_.reevaluate();
  for (const auto& [state, hidden] : recurrences_) tape_.set_value(state, tape_.value(hidden));
  return tape_.value(output_).row(0);
}

void StepRunner::reset() {
  for (const auto& [state, hidden] : recurrences_) {
    tape_.set_value(state, Matrix(1, tape_.node(state).width));
  }
}

}  // namespace safemut::ad
