#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "safemut/ad/architecture.hpp"
#include "safemut/ad/param_vector.hpp"
#include "safemut/ad/forward.hpp"
#include "safemut/ad/tensor.hpp"
#include "safemut/mutation/archive.hpp"
#include "safemut/random.hpp"

namespace safemut::testing {

inline ad::ArchitectureSpec tanh_mlp(std::size_t in = 3, std::size_t hidden = 6, std::size_t out = 2) {
  ad::ArchitectureSpec a;
  a.id = "tanh_mlp";
  a.input_width = in;
  a.output_width = out;
  a.layers = {ad::DenseLayer{in, hidden, ad::Activation::kTanh},
              ad::DenseLayer{hidden, hidden, ad::Activation::kTanh},
              ad::DenseLayer{hidden, out, ad::Activation::kTanh}};
  return a;
}

inline ad::ArchitectureSpec small_rnn(std::size_t units = 5) {
  ad::ArchitectureSpec a;
  a.id = "small_rnn";
  a.input_width = 2;
  a.output_width = 2;
  a.layers = {ad::RecurrentLayer{2, units, ad::Activation::kTanh},
              ad::RecurrentLayer{units, units, ad::Activation::kTanh},
              ad::DenseLayer{units, 2, ad::Activation::kSigmoid}};
  return a;
}

inline ad::ArchitectureSpec small_residual() {
  ad::ArchitectureSpec a;
  a.id = "small_residual";
  a.input_width = 3;
  a.output_width = 2;
  a.layers = {ad::DenseLayer{3, 6, ad::Activation::kTanh}, ad::ResidualBlock{6, ad::Activation::kTanh, 4},
              ad::DenseLayer{6, 6, ad::Activation::kSelu}, ad::DenseLayer{6, 2, ad::Activation::kSigmoid}};
  return a;
}

inline ad::ParamVector random_params(const ad::ArchitectureSpec& arch, Rng& rng, double sigma = 0.5) {
  return ad::ParamVector(gaussian_vector(ad::param_count(arch), sigma, rng));
}

inline ad::SequenceBatch random_batch(std::size_t length, std::size_t batch, std::size_t width, Rng& rng) {
  ad::SequenceBatch b(length, batch, width);
  std::normal_distribution<double> n(0.0, 1.0);
  for (std::size_t t = 0; t < length; ++t) {
    for (double& v : b.step(t).flat()) v = n(rng);
  }
  return b;
}

/// max |a - b| / max(max |b|, floor).
inline double rel_error(std::span<const double> a, std::span<const double> b, double floor = 1e-12) {
  double diff = 0.0;
  double scale = floor;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max(scale, std::abs(b[i]));
  }
  return diff / scale;
}

inline std::vector<double> flatten(const ad::SequenceBatch& b) {
  std::vector<double> out;
  for (const auto& m : b.steps()) out.insert(out.end(), m.flat().begin(), m.flat().end());
  return out;
}

// Central differences of sum(seed * forward) with respect to every parameter.
inline std::vector<double> fd_vjp(const ad::ArchitectureSpec& arch, const ad::ParamVector& w,
                           const ad::SequenceBatch& x, const ad::SequenceBatch& seed, double h = 1e-5) {
  std::vector<double> g(w.size());
  for (std::size_t p = 0; p < w.size(); ++p) {
    ad::ParamVector plus = w;
    ad::ParamVector minus = w;
    plus[p] += h;
    minus[p] -= h;
    g[p] = (dot(seed, ad::forward(arch, plus, x).outputs) - dot(seed, ad::forward(arch, minus, x).outputs)) /
           (2.0 * h);
  }
  return g;
}

inline std::vector<double> fd_jvp(const ad::ArchitectureSpec& arch, const ad::ParamVector& w,
                           const ad::SequenceBatch& x, std::span<const double> v, double h = 1e-5) {
  std::vector<double> step(v.begin(), v.end());
  for (double& s : step) s *= h;
  const auto plus = flatten(ad::forward(arch, ad::add(w, step), x).outputs);
  for (double& s : step) s = -s;
  const auto minus = flatten(ad::forward(arch, ad::add(w, step), x).outputs);
  std::vector<double> out(plus.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (plus[i] - minus[i]) / (2.0 * h);
  return out;
}


inline mutation::ExperienceArchive archive_for(const ad::ArchitectureSpec& arch, const ad::ParamVector& w,
                                               const ad::SequenceBatch& x) {
  return {x, ad::forward(arch, w, x).outputs};
}

}  // namespace safemut::testing
