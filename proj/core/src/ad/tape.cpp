#include "safemut/ad/tape.hpp"

#include <cmath>
#include <string>

#include "safemut/errors.hpp"

namespace safemut::ad {

namespace {

constexpr double kSeluLambda = 1.0507009873554804934193349852946;
constexpr double kSeluAlpha = 1.6732632423543772848170429916717;

}  // namespace

std::string_view to_string(Op op) {
  switch (op) {
    case Op::kInput: return "input";
    case Op::kState: return "state";
    case Op::kAffine: return "affine";
    case Op::kActivate: return "activate";
    case Op::kAdd: return "add";
    case Op::kScale: return "scale";
    case Op::kConcat: return "concat";
    case Op::kSlice: return "slice";
  }
  return "?";
}

double activate_value(Activation a, double x) {
  switch (a) {
    case Activation::kIdentity: return x;
    case Activation::kTanh: return std::tanh(x);
    case Activation::kSelu: return x > 0.0 ? kSeluLambda * x : kSeluLambda * kSeluAlpha * std::expm1(x);
    case Activation::kSigmoid: return 1.0 / (1.0 + std::exp(-x));
  }
  return x;
}

namespace {

void activate_all(Activation a, std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  switch (a) {
    case Activation::kIdentity:
      std::copy(x.begin(), x.end(), y.begin());
      return;
    case Activation::kTanh:
      for (std::size_t i = 0; i < n; ++i) y[i] = std::tanh(x[i]);
      return;
    case Activation::kSelu:
      for (std::size_t i = 0; i < n; ++i) {
        y[i] = x[i] > 0.0 ? kSeluLambda * x[i] : kSeluLambda * kSeluAlpha * std::expm1(x[i]);
      }
      return;
    case Activation::kSigmoid:
      for (std::size_t i = 0; i < n; ++i) y[i] = 1.0 / (1.0 + std::exp(-x[i]));
      return;
  }
}

}  // namespace

double activation_derivative(Activation a, double x, double y) {
  switch (a) {
    case Activation::kIdentity: return 1.0;
    case Activation::kTanh: return 1.0 - y * y;
    case Activation::kSelu: return x > 0.0 ? kSeluLambda : y + kSeluLambda * kSeluAlpha;
    case Activation::kSigmoid: return y * (1.0 - y);
  }
  return 1.0;
}

Tape::Tape(ParamVector params, std::size_t batch) : params_(std::move(params)), batch_(batch) {}

void Tape::check_operand(NodeId id) const {
  if (id >= nodes_.size()) throw ConfigError("tape operand " + std::to_string(id) + " does not exist");
}

NodeId Tape::append(Node node) {
  nodes_.push_back(std::move(node));
  values_.emplace_back(batch_, nodes_.back().width);
  const NodeId id = nodes_.size() - 1;
  evaluate(id, values_);
  return id;
}

NodeId Tape::input(const Matrix& value) {
  if (value.rows() != batch_) {
    throw ConfigError("input has " + std::to_string(value.rows()) + " rows, tape batch is " +
                      std::to_string(batch_));
  }
  Node n;
  n.op = Op::kInput;
  n.width = value.cols();
  nodes_.push_back(std::move(n));
  values_.push_back(value);
  inputs_.push_back(nodes_.size() - 1);
  evaluate(nodes_.size() - 1, values_);
  return nodes_.size() - 1;
}

NodeId Tape::state(std::size_t width) {
  Node n;
  n.op = Op::kState;
  n.width = width;
  return append(std::move(n));
}

NodeId Tape::affine(std::span<const AffineTerm> terms, std::size_t bias_offset, std::size_t width) {
  Node n;
  n.op = Op::kAffine;
  n.width = width;
  for (const auto& t : terms) {
    check_operand(t.operand);
    if (t.weight_offset + nodes_[t.operand].width * width > params_.size()) {
      throw ConfigError("affine weight block exceeds parameter vector");
    }
  }
  if (bias_offset != kNoParams && bias_offset + width > params_.size()) {
    throw ConfigError("affine bias block exceeds parameter vector");
  }
  n.terms.assign(terms.begin(), terms.end());
  n.bias_offset = bias_offset;
  return append(std::move(n));
}

NodeId Tape::activate(NodeId x, Activation activation) {
  check_operand(x);
  Node n;
  n.op = Op::kActivate;
  n.width = nodes_[x].width;
  n.operands = {x};
  n.activation = activation;
  return append(std::move(n));
}

NodeId Tape::add(NodeId a, NodeId b) {
  check_operand(a);
  check_operand(b);
  if (nodes_[a].width != nodes_[b].width) throw ConfigError("add: operand widths differ");
  Node n;
  n.op = Op::kAdd;
  n.width = nodes_[a].width;
  n.operands = {a, b};
  return append(std::move(n));
}

NodeId Tape::scale(NodeId x, std::size_t param_offset, std::vector<double> coefficients) {
  check_operand(x);
  if (coefficients.size() != nodes_[x].width) throw ConfigError("scale: coefficient count != width");
  if (param_offset + coefficients.size() > params_.size()) {
    throw ConfigError("scale weights exceed parameter vector");
  }
  Node n;
  n.op = Op::kScale;
  n.width = nodes_[x].width;
  n.operands = {x};
  n.param_offset = param_offset;
  n.coefficients = std::move(coefficients);
  return append(std::move(n));
}

NodeId Tape::concat(std::span<const NodeId> parts) {
  Node n;
  n.op = Op::kConcat;
  for (NodeId p : parts) {
    check_operand(p);
    n.width += nodes_[p].width;
  }
  n.operands.assign(parts.begin(), parts.end());
  return append(std::move(n));
}

NodeId Tape::slice(NodeId x, std::size_t begin, std::size_t width) {
  check_operand(x);
  if (begin + width > nodes_[x].width) throw ConfigError("slice out of range");
  Node n;
  n.op = Op::kSlice;
  n.width = width;
  n.operands = {x};
  n.slice_begin = begin;
  return append(std::move(n));
}

void Tape::mark_output(NodeId id) {
  check_operand(id);
  outputs_.push_back(id);
}

void Tape::set_value(NodeId id, const Matrix& value) {
  check_operand(id);
  if (nodes_[id].op != Op::kInput && nodes_[id].op != Op::kState) {
    throw ConfigError("only input and state nodes can be set");
  }
  if (value.rows() != batch_ || value.cols() != nodes_[id].width) {
    throw ConfigError("set_value: shape mismatch");
  }
  values_[id] = value;
}

void Tape::reevaluate() {
  for (NodeId id = 0; id < nodes_.size(); ++id) evaluate(id, values_);
}

std::vector<Matrix> Tape::replay() const {
  std::vector<Matrix> fresh;
  fresh.reserve(nodes_.size());
  for (NodeId id = 0; id < nodes_.size(); ++id) {
    const Op op = nodes_[id].op;
    fresh.push_back((op == Op::kInput || op == Op::kState) ? values_[id]
                                                             : Matrix(batch_, nodes_[id].width));
    evaluate(id, fresh);
  }
  std::vector<Matrix> out;
  for (NodeId id : outputs_) out.push_back(fresh[id]);
  return out;
}

SequenceBatch Tape::output_values() const {
  std::vector<Matrix> out;
  out.reserve(outputs_.size());
  for (NodeId id : outputs_) out.push_back(values_[id]);
  return SequenceBatch(std::move(out));
}

void Tape::evaluate(NodeId id, std::vector<Matrix>& values) const {
  const Node& n = nodes_[id];
  Matrix& y = values[id];
  const double* p = params_.data();
  switch (n.op) {
    case Op::kInput:
    case Op::kState:
      break;
    case Op::kAffine: {
      const std::size_t out = n.width;
      for (std::size_t r = 0; r < batch_; ++r) {
        double* __restrict yr = y.row(r).data();
        std::fill(yr, yr + out, 0.0);
        for (const auto& term : n.terms) {
          const Matrix& x = values[term.operand];
          const double* __restrict xr = x.row(r).data();
          const double* __restrict w = p + term.weight_offset;
          for (std::size_t j = 0; j < x.cols(); ++j) {
            const double xj = xr[j];
            const double* __restrict wj = w + j * out;
            for (std::size_t o = 0; o < out; ++o) yr[o] += wj[o] * xj;
          }
        }
        if (n.bias_offset != kNoParams) {
          const double* __restrict b = p + n.bias_offset;
          for (std::size_t o = 0; o < out; ++o) yr[o] += b[o];
        }
      }
      break;
    }
    case Op::kActivate: {
      auto x = values[n.operands[0]].flat();
      auto yv = y.flat();
      activate_all(n.activation, x, yv);
      break;
    }
    case Op::kAdd: {
      auto a = values[n.operands[0]].flat();
      auto b = values[n.operands[1]].flat();
      auto yv = y.flat();
      for (std::size_t i = 0; i < yv.size(); ++i) yv[i] = a[i] + b[i];
      break;
    }
    case Op::kScale: {
      const Matrix& x = values[n.operands[0]];
      const double* w = p + n.param_offset;
      for (std::size_t r = 0; r < batch_; ++r) {
        auto xr = x.row(r);
        auto yr = y.row(r);
        for (std::size_t j = 0; j < n.width; ++j) yr[j] = n.coefficients[j] * w[j] * xr[j];
      }
      break;
    }
    case Op::kConcat: {
      for (std::size_t r = 0; r < batch_; ++r) {
        auto yr = y.row(r);
        std::size_t at = 0;
        for (NodeId part : n.operands) {
          auto xr = values[part].row(r);
          std::copy(xr.begin(), xr.end(), yr.begin() + static_cast<std::ptrdiff_t>(at));
          at += xr.size();
        }
      }
      break;
    }
    case Op::kSlice: {
      const Matrix& x = values[n.operands[0]];
      for (std::size_t r = 0; r < batch_; ++r) {
        auto xr = x.row(r).subspan(n.slice_begin, n.width);
        std::copy(xr.begin(), xr.end(), y.row(r).begin());
      }
      break;
    }
  }
  for (double v : y.flat()) {
    if (!std::isfinite(v)) {
      throw NumericError("non-finite value at tape node " + std::to_string(id) + " (" +
                         std::string(to_string(n.op)) + ")");
    }
  }
}

}  // namespace safemut::ad
