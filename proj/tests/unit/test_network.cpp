#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "helpers.hpp"
#include "safemut/ad/forward.hpp"
#include "safemut/errors.hpp"
#include "safemut/net/architectures.hpp"
#include "safemut/net/genome.hpp"
#include "safemut/net/init.hpp"
#include "safemut/net/serialization.hpp"

using namespace safemut;
using namespace safemut::testing;

TEST(Architectures, ParityNet) {
  const auto arch = net::build_parity_net();
  EXPECT_EQ(arch.input_width, 1u);
  EXPECT_EQ(arch.output_width, 1u);
  EXPECT_TRUE(arch.is_recurrent());
  const auto n = ad::param_count(arch);
  EXPECT_GE(n, 1200u);
  EXPECT_LE(n, 1400u);
}

TEST(Architectures, MazeNetHas1266Parameters) {
  const auto arch = net::build_maze_net();
  EXPECT_EQ(ad::param_count(arch), 1266u);
  EXPECT_EQ(arch.output_width, 2u);
  std::size_t selu_hidden = 0;
  for (const auto& layer : arch.layers) {
    const auto& d = std::get<ad::DenseLayer>(layer);
    if (d.activation == ad::Activation::kSelu) {
      EXPECT_EQ(d.out, 8u);
      ++selu_hidden;
    }
  }
  EXPECT_EQ(selu_hidden, 16u);
}

TEST(Architectures, ResidualNets) {
  const auto r32 = net::build_residual_net(32);
  const auto r64 = net::build_residual_net(64);
  const auto r101 = net::build_residual_net(101);
  EXPECT_NEAR(static_cast<double>(ad::param_count(r32)), 5e5, 5e4);
  EXPECT_NEAR(static_cast<double>(ad::param_count(r64)), 1e6, 1e5);
  EXPECT_NEAR(static_cast<double>(ad::param_count(r101)), 2e5, 5e4);
  for (const auto& layer : r101.layers) {
    if (const auto* b = std::get_if<ad::ResidualBlock>(&layer)) {
      EXPECT_EQ(b->width, 48u);
      EXPECT_EQ(b->skip_period, 4u);
    }
  }
  EXPECT_THROW(net::build_residual_net(50), ConfigError);
}

TEST(Architectures, ResidualNetLayerCountMatchesDepth) {
  for (std::size_t depth : {32u, 64u, 101u}) {
    std::size_t tanh_layers = 0;
    for (const auto& layer : net::build_residual_net(depth).layers) {
      if (const auto* d = std::get_if<ad::DenseLayer>(&layer)) {
        tanh_layers += d->activation == ad::Activation::kTanh;
      } else if (const auto* b = std::get_if<ad::ResidualBlock>(&layer)) {
        tanh_layers += b->skip_period;
      }
    }
    EXPECT_EQ(tanh_layers, depth);
  }
}

TEST(Architectures, ZeroParamsResidualIsFinite) {
  const auto arch = net::build_residual_net(101);
  const ad::ParamVector zero(ad::param_count(arch));
  const auto out = ad::forward(arch, zero, {std::vector<double>(arch.input_width, 0.7)});
  for (double y : out[0]) EXPECT_DOUBLE_EQ(y, 0.5);  // sigmoid(0)
}

TEST(Architectures, LookupById) {
  for (const char* id : {"parity", "maze", "residual32", "residual64", "residual101", "toy", "linear"}) {
    EXPECT_EQ(net::architecture_by_id(id).id, id);
  }
  EXPECT_THROW(net::architecture_by_id("lstm"), ConfigError);
}

TEST(Architectures, IncompatibleWidthsRejected) {
  ad::ArchitectureSpec a;
  a.id = "bad";
  a.input_width = 3;
  a.output_width = 1;
  a.layers = {ad::DenseLayer{3, 4, ad::Activation::kTanh}, ad::DenseLayer{5, 1, ad::Activation::kSigmoid}};
  EXPECT_THROW(ad::validate(a), ConfigError);
}

TEST(Layout, BlocksTileTheVectorExactly) {
  for (const auto& arch : {net::build_parity_net(), net::build_maze_net(), small_residual()}) {
    const auto layout = ad::param_layout(arch);
    std::vector<int> hits(ad::param_count(arch), 0);
    for (const auto& b : layout) {
      for (std::size_t r = 0; r < b.rows; ++r) {
        for (std::size_t c = 0; c < b.cols; ++c) ++hits.at(b.index(r, c));
      }
    }
    for (int h : hits) EXPECT_EQ(h, 1);
    // Stable across calls.
    const auto again = ad::param_layout(arch);
    ASSERT_EQ(again.size(), layout.size());
    for (std::size_t i = 0; i < layout.size(); ++i) EXPECT_EQ(again[i].offset, layout[i].offset);
  }
}

TEST(Xavier, VarianceBiasesAndDeterminism) {
  ad::ArchitectureSpec a;
  a.id = "dense8";
  a.input_width = 8;
  a.output_width = 8;
  a.layers = {ad::DenseLayer{8, 8, ad::Activation::kTanh}};
  // 10,000 weight draws pooled over repeated inits.
  double sum = 0.0;
  double sq = 0.0;
  std::size_t n = 0;
  Rng rng(42);
  const auto layout = ad::param_layout(a);
  while (n < 10000) {
    const auto w = net::xavier_init(a, rng);
    for (const auto& b : layout) {
      for (std::size_t i = b.offset; i < b.offset + b.size(); ++i) {
        if (b.role == ad::BlockRole::kBias) {
          EXPECT_EQ(w[i], 0.0);
        } else {
          sum += w[i];
          sq += w[i] * w[i];
          ++n;
        }
      }
    }
  }
  const double mean = sum / static_cast<double>(n);
  const double var = sq / static_cast<double>(n) - mean * mean;
  EXPECT_NEAR(var, 2.0 / 16.0, 0.3 * 2.0 / 16.0);

  Rng r1(9);
  Rng r2(9);
  EXPECT_EQ(net::xavier_init(net::build_maze_net(), r1), net::xavier_init(net::build_maze_net(), r2));
}

TEST(Serialization, ArchitectureRoundTrip) {
  for (const auto& arch : {net::build_parity_net(), net::build_maze_net(), net::build_residual_net(32),
                           net::build_toy_net(), small_residual()}) {
    const auto back = net::architecture_from_json(net::to_json(arch));
    EXPECT_EQ(back.id, arch.id);
    EXPECT_EQ(ad::param_count(back), ad::param_count(arch));
    EXPECT_EQ(net::to_json(back), net::to_json(arch));
  }
}

TEST(Genome, TextRoundTripIsExact) {
  Rng rng(3);
  net::Genome g;
  g.params = net::xavier_init(net::build_parity_net(), rng);
  g.params[0] = 1.0 / 3.0;
  g.arch_id = "parity";
  g.id = 77;
  g.lineage = {12, "SM-G-SUM"};
  std::stringstream ss;
  net::write_genome(ss, g);
  const auto back = net::read_genome(ss);
  EXPECT_EQ(back.params, g.params);
  EXPECT_EQ(back.arch_id, "parity");
  EXPECT_EQ(back.id, 77u);
  EXPECT_EQ(back.lineage.parent_id, 12);
  EXPECT_EQ(back.lineage.method, "SM-G-SUM");
}

TEST(Genome, TruncatedFileRejected) {
  std::stringstream ss("arch toy\ncount 2\n1.0\n");
  EXPECT_THROW(net::read_genome(ss), ConfigError);
}
