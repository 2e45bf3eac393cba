#include "safemut/ad/differentiate.hpp"

#include <string>

#include "safemut/errors.hpp"

namespace safemut::ad {

namespace {

void check_seed(const Tape& tape, const SequenceBatch& seed) {
  const auto& outs = tape.outputs();
  if (seed.length() != outs.size()) {
    throw ConfigError("seed has " + std::to_string(seed.length()) + " steps, tape has " +
                      std::to_string(outs.size()) + " outputs");
  }
  for (std::size_t t = 0; t < outs.size(); ++t) {
    const Matrix& s = seed.step(t);
    if (s.rows() != tape.batch() || s.cols() != tape.node(outs[t]).width) {
      throw ConfigError("seed shape does not match tape output " + std::to_string(t));
    }
  }
}

/// Adjoint of every node with respect to the seeded outputs. Parameter
/// gradients are not formed here.
std::vector<Matrix> backward(const Tape& tape, const SequenceBatch& seed) {
  check_seed(tape, seed);
  const std::size_t batch = tape.batch();
  std::vector<Matrix> adj(tape.size());
  auto ensure = [&](NodeId id) -> Matrix& {
    if (adj[id].size() == 0 && tape.node(id).width > 0) adj[id] = Matrix(batch, tape.node(id).width);
    return adj[id];
  };
  for (std::size_t t = 0; t < tape.outputs().size(); ++t) {
    Matrix& a = ensure(tape.outputs()[t]);
    auto s = seed.step(t).flat();
    auto av = a.flat();
    for (std::size_t i = 0; i < av.size(); ++i) av[i] += s[i];
  }
  const double* p = tape.params().data();
  for (NodeId id = tape.size(); id-- > 0;) {
    if (adj[id].size() == 0) continue;
    const Node& n = tape.node(id);
    const Matrix& delta = adj[id];
    switch (n.op) {
      case Op::kInput:
      case Op::kState:
        break;
      case Op::kAffine: {
        for (const auto& term : n.terms) {
          Matrix& ax = ensure(term.operand);
          const double* w = p + term.weight_offset;
          const std::size_t in = ax.cols();
          for (std::size_t r = 0; r < batch; ++r) {
            const double* dr = delta.row(r).data();
            double* axr = ax.row(r).data();
            for (std::size_t j = 0; j < in; ++j) {
              const double* wj = w + j * n.width;
              double s = 0.0;
              for (std::size_t o = 0; o < n.width; ++o) s += wj[o] * dr[o];
              axr[j] += s;
            }
          }
        }
        break;
      }
      case Op::kActivate: {
        const NodeId x = n.operands[0];
        Matrix& ax = ensure(x);
        auto xv = tape.value(x).flat();
        auto yv = tape.value(id).flat();
        auto dv = delta.flat();
        auto av = ax.flat();
        for (std::size_t i = 0; i < av.size(); ++i) {
          av[i] += activation_derivative(n.activation, xv[i], yv[i]) * dv[i];
        }
        break;
      }
      case Op::kAdd: {
        for (NodeId operand : n.operands) {
          auto av = ensure(operand).flat();
          auto dv = delta.flat();
          for (std::size_t i = 0; i < av.size(); ++i) av[i] += dv[i];
        }
        break;
      }
      case Op::kScale: {
        Matrix& ax = ensure(n.operands[0]);
        const double* w = p + n.param_offset;
        for (std::size_t r = 0; r < batch; ++r) {
          auto dr = delta.row(r);
          auto axr = ax.row(r);
          for (std::size_t j = 0; j < n.width; ++j) axr[j] += n.coefficients[j] * w[j] * dr[j];
        }
        break;
      }
      case Op::kConcat: {
        std::size_t at = 0;
        for (NodeId part : n.operands) {
          Matrix& ax = ensure(part);
          for (std::size_t r = 0; r < batch; ++r) {
            auto dr = delta.row(r);
            auto axr = ax.row(r);
            for (std::size_t j = 0; j < axr.size(); ++j) axr[j] += dr[at + j];
          }
          at += tape.node(part).width;
        }
        break;
      }
      case Op::kSlice: {
        Matrix& ax = ensure(n.operands[0]);
        for (std::size_t r = 0; r < batch; ++r) {
          auto dr = delta.row(r);
          auto axr = ax.row(r);
          for (std::size_t j = 0; j < n.width; ++j) axr[n.slice_begin + j] += dr[j];
        }
        break;
      }
    }
  }
  return adj;
}

/// Adds the parameter gradient contributed by rows [begin, end) into grad.
void accumulate_param_grads(const Tape& tape, const std::vector<Matrix>& adj, std::size_t begin,
                            std::size_t end, std::span<double> grad) {
  for (NodeId id = 0; id < tape.size(); ++id) {
    if (adj[id].size() == 0) continue;
    const Node& n = tape.node(id);
    const Matrix& delta = adj[id];
    if (n.op == Op::kAffine) {
      for (const auto& term : n.terms) {
        const Matrix& x = tape.value(term.operand);
        double* g = grad.data() + term.weight_offset;
        for (std::size_t r = begin; r < end; ++r) {
          const double* xr = x.row(r).data();
          const double* dr = delta.row(r).data();
          for (std::size_t j = 0; j < x.cols(); ++j) {
            const double xj = xr[j];
            double* gj = g + j * n.width;
            for (std::size_t o = 0; o < n.width; ++o) gj[o] += xj * dr[o];
          }
        }
      }
      if (n.bias_offset != kNoParams) {
        double* g = grad.data() + n.bias_offset;
        for (std::size_t r = begin; r < end; ++r) {
          const double* dr = delta.row(r).data();
          for (std::size_t o = 0; o < n.width; ++o) g[o] += dr[o];
        }
      }
    } else if (n.op == Op::kScale) {
      const Matrix& x = tape.value(n.operands[0]);
      double* g = grad.data() + n.param_offset;
      for (std::size_t r = begin; r < end; ++r) {
        auto xr = x.row(r);
        auto dr = delta.row(r);
        for (std::size_t j = 0; j < n.width; ++j) g[j] += n.coefficients[j] * xr[j] * dr[j];
      }
    }
  }
}

}  // namespace

std::vector<double> vjp(const Tape& tape, const SequenceBatch& seed) {
  const auto adj = backward(tape, seed);
  std::vector<double> grad(tape.param_count(), 0.0);
  accumulate_param_grads(tape, adj, 0, tape.batch(), grad);
  return grad;
}

void vjp_per_row(const Tape& tape, const SequenceBatch& seed,
                 const std::function<void(std::size_t, std::span<const double>)>& visit) {
  const auto adj = backward(tape, seed);
  std::vector<double> grad(tape.param_count());
  for (std::size_t r = 0; r < tape.batch(); ++r) {
    std::fill(grad.begin(), grad.end(), 0.0);
    accumulate_param_grads(tape, adj, r, r + 1, grad);
    visit(r, grad);
  }
}

SequenceBatch jvp(const Tape& tape, std::span<const double> tangent) {
  if (tangent.size() != tape.param_count()) {
    throw ConfigError("tangent length " + std::to_string(tangent.size()) + " != parameter count " +
                      std::to_string(tape.param_count()));
  }
  const std::size_t batch = tape.batch();
  const double* p = tape.params().data();
  const double* dp = tangent.data();
  std::vector<Matrix> dot_values(tape.size());
  for (NodeId id = 0; id < tape.size(); ++id) {
    const Node& n = tape.node(id);
    Matrix dy(batch, n.width);
    switch (n.op) {
      case Op::kInput:
      case Op::kState:
        break;
      case Op::kAffine: {
        for (std::size_t r = 0; r < batch; ++r) {
          double* yr = dy.row(r).data();
          for (const auto& term : n.terms) {
            const double* xr = tape.value(term.operand).row(r).data();
            const double* dxr = dot_values[term.operand].row(r).data();
            const double* w = p + term.weight_offset;
            const double* dw = dp + term.weight_offset;
            const std::size_t in = tape.node(term.operand).width;
            for (std::size_t j = 0; j < in; ++j) {
              const double xj = xr[j];
              const double dxj = dxr[j];
              const double* wj = w + j * n.width;
              const double* dwj = dw + j * n.width;
              for (std::size_t o = 0; o < n.width; ++o) yr[o] += wj[o] * dxj + dwj[o] * xj;
            }
          }
          if (n.bias_offset != kNoParams) {
            const double* db = dp + n.bias_offset;
            for (std::size_t o = 0; o < n.width; ++o) yr[o] += db[o];
          }
        }
        break;
      }
      case Op::kActivate: {
        const NodeId x = n.operands[0];
        auto xv = tape.value(x).flat();
        auto yv = tape.value(id).flat();
        auto dxv = dot_values[x].flat();
        auto out = dy.flat();
        for (std::size_t i = 0; i < out.size(); ++i) {
          out[i] = activation_derivative(n.activation, xv[i], yv[i]) * dxv[i];
        }
        break;
      }
      case Op::kAdd: {
        auto a = dot_values[n.operands[0]].flat();
        auto b = dot_values[n.operands[1]].flat();
        auto out = dy.flat();
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i];
        break;
      }
      case Op::kScale: {
        const Matrix& x = tape.value(n.operands[0]);
        const Matrix& dx = dot_values[n.operands[0]];
        const double* w = p + n.param_offset;
        const double* dw = dp + n.param_offset;
        for (std::size_t r = 0; r < batch; ++r) {
          auto yr = dy.row(r);
          for (std::size_t j = 0; j < n.width; ++j) {
            yr[j] = n.coefficients[j] * (dw[j] * x(r, j) + w[j] * dx(r, j));
          }
        }
        break;
      }
      case Op::kConcat: {
        for (std::size_t r = 0; r < batch; ++r) {
          std::size_t at = 0;
          for (NodeId part : n.operands) {
            auto xr = dot_values[part].row(r);
            std::copy(xr.begin(), xr.end(), dy.row(r).begin() + static_cast<std::ptrdiff_t>(at));
            at += xr.size();
          }
        }
        break;
      }
      case Op::kSlice: {
        for (std::size_t r = 0; r < batch; ++r) {
          auto xr = dot_values[n.operands[0]].row(r).subspan(n.slice_begin, n.width);
          std::copy(xr.begin(), xr.end(), dy.row(r).begin());
        }
        break;
      }
    }
    dot_values[id] = std::move(dy);
  }
  std::vector<Matrix> out;
  for (NodeId id : tape.outputs()) out.push_back(dot_values[id]);
  return SequenceBatch(std::move(out));
}

}  // namespace safemut::ad
