#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "helpers.hpp"
#include "safemut/ad/differentiate.hpp"
#include "safemut/ad/forward.hpp"
#include "safemut/errors.hpp"
#include "safemut/net/architectures.hpp"

using namespace safemut;
using namespace safemut::testing;

namespace {
using Sequence = std::vector<std::vector<double>>;

}  // namespace

TEST(Forward, LinearNetMultiplies) {
  const auto out = ad::forward(net::build_linear_net(), ad::ParamVector({2.0}), Sequence{{3.0}});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_DOUBLE_EQ(out[0][0], 6.0);
}

TEST(Forward, ToyModelCoefficients) {
  const auto out = ad::forward(net::build_toy_net(), ad::ParamVector({0.01, 10.0}), {{1.0, 1.0}});
  EXPECT_DOUBLE_EQ(out[0][0], 1.0);
  EXPECT_DOUBLE_EQ(out[0][1], 1.0);
}

TEST(Forward, ParityNetGivesOneOutputPerStepInUnitInterval) {
  const auto arch = net::build_parity_net();
  Rng rng(7);
  const auto w = random_params(arch, rng);
  const auto out = ad::forward(arch, w, {{1.0}, {0.0}, {1.0}, {1.0}});
  ASSERT_EQ(out.size(), 4u);
  for (const auto& y : out) {
    ASSERT_EQ(y.size(), 1u);
    EXPECT_TRUE(std::isfinite(y[0]));
    EXPECT_GT(y[0], 0.0);
    EXPECT_LT(y[0], 1.0);
  }
}

TEST(Forward, RecurrentStateStartsAtZero) {
  // With zero input at the first step, the first output only sees biases.
  const auto arch = small_rnn();
  Rng rng(3);
  const auto w = random_params(arch, rng);
  const auto a = ad::forward(arch, w, {{0.0, 0.0}});
  const auto b = ad::forward(arch, w, {{0.0, 0.0}, {1.0, 1.0}});
  EXPECT_EQ(a[0], b[0]);
}

TEST(Forward, DimensionMismatchIsConfigError) {
  const auto arch = tanh_mlp();
  EXPECT_THROW(ad::forward(arch, ad::ParamVector(3), {{1.0, 2.0, 3.0}}), ConfigError);
  Rng rng(1);
  const auto w = random_params(arch, rng);
  EXPECT_THROW(ad::forward(arch, w, {{1.0, 2.0}}), ConfigError);
}

TEST(Forward, NonFiniteValueNamesTheNode) {
  const auto arch = net::build_linear_net();
  try {
    ad::forward(arch, ad::ParamVector({std::numeric_limits<double>::infinity()}), Sequence{{1.0}});
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("node"), std::string::npos);
  }
}

TEST(Forward, DeterministicAndReplayable) {
  for (const auto& arch : {tanh_mlp(), small_rnn(), small_residual(), net::build_maze_net()}) {
    Rng rng(11);
    const auto w = random_params(arch, rng, 0.3);
    const auto x = random_batch(arch.is_recurrent() ? 4 : 1, 5, arch.input_width, rng);
    const auto a = ad::forward(arch, w, x);
    const auto b = ad::forward(arch, w, x);
    EXPECT_EQ(a.outputs, b.outputs) << arch.id;
    const auto replayed = a.tape.replay();
    ASSERT_EQ(replayed.size(), a.outputs.length());
    for (std::size_t t = 0; t < replayed.size(); ++t) EXPECT_EQ(replayed[t], a.outputs.step(t)) << arch.id;
  }
}

TEST(Forward, BatchRowsMatchStepRunnerBitForBit) {
  const auto arch = small_rnn();
  Rng rng(5);
  const auto w = random_params(arch, rng);
  const auto x = random_batch(6, 3, 2, rng);
  const auto batched = ad::forward(arch, w, x).outputs;
  for (std::size_t r = 0; r < 3; ++r) {
    ad::StepRunner runner(arch, w);
    for (std::size_t t = 0; t < 6; ++t) {
      const auto y = runner.step(x.step(t).row(r));
      for (std::size_t k = 0; k < 2; ++k) EXPECT_EQ(y[k], batched.step(t)(r, k));
    }
  }
}

TEST(Vjp, LinearNet) {
  const auto fwd = ad::forward(net::build_linear_net(), ad::ParamVector({1.5}), ad::SequenceBatch::from_rows({{3.0}}));
  const auto g = ad::vjp(fwd.tape, ad::SequenceBatch::from_rows({{1.0}}));
  ASSERT_EQ(g.size(), 1u);
  EXPECT_DOUBLE_EQ(g[0], 3.0);
}

TEST(Vjp, ToyModelSeedOnFirstOutput) {
  const auto fwd =
      ad::forward(net::build_toy_net(), ad::ParamVector({0.3, -2.0}), ad::SequenceBatch::from_rows({{1.0, 1.0}}));
  const auto g = ad::vjp(fwd.tape, ad::SequenceBatch::from_rows({{1.0, 0.0}}));
  EXPECT_DOUBLE_EQ(g[0], 100.0);
  EXPECT_DOUBLE_EQ(g[1], 0.0);
}

TEST(Vjp, SeedShapeMismatchIsConfigError) {
  const auto fwd = ad::forward(net::build_toy_net(), ad::ParamVector({1.0, 1.0}), ad::SequenceBatch::from_rows({{1.0, 1.0}}));
  EXPECT_THROW(ad::vjp(fwd.tape, ad::SequenceBatch::from_rows({{1.0}})), ConfigError);
  EXPECT_THROW(ad::jvp(fwd.tape, std::vector<double>{1.0}), ConfigError);
}

TEST(Vjp, MatchesFiniteDifferences) {
  struct Case {
    ad::ArchitectureSpec arch;
    std::size_t length;
  };
  for (const auto& c : {Case{tanh_mlp(), 1}, Case{small_rnn(), 5}, Case{small_residual(), 1}}) {
    Rng rng(21);
    const auto w = random_params(c.arch, rng);
    const auto x = random_batch(c.length, 3, c.arch.input_width, rng);
    const auto seed = random_batch(c.length, 3, c.arch.output_width, rng);
    const auto g = ad::vjp(ad::forward(c.arch, w, x).tape, seed);
    EXPECT_LE(rel_error(g, fd_vjp(c.arch, w, x, seed)), 1e-6) << c.arch.id;
  }
}

TEST(Vjp, PerRowGradientsSumToBatchGradient) {
  const auto arch = small_rnn();
  Rng rng(4);
  const auto w = random_params(arch, rng);
  const auto x = random_batch(3, 4, 2, rng);
  const auto seed = random_batch(3, 4, 2, rng);
  const auto fwd = ad::forward(arch, w, x);
  const auto total = ad::vjp(fwd.tape, seed);
  std::vector<double> sum(total.size(), 0.0);
  std::size_t rows = 0;
  ad::vjp_per_row(fwd.tape, seed, [&](std::size_t, std::span<const double> g) {
    ++rows;
    for (std::size_t p = 0; p < g.size(); ++p) sum[p] += g[p];
  });
  EXPECT_EQ(rows, 4u);
  EXPECT_LE(rel_error(sum, total), 1e-12);
}

TEST(Jvp, LinearAndToyExamples) {
  const auto lin = ad::forward(net::build_linear_net(), ad::ParamVector({1.0}), ad::SequenceBatch::from_rows({{3.0}}));
  EXPECT_DOUBLE_EQ(ad::jvp(lin.tape, std::vector<double>{1.0}).step(0)(0, 0), 3.0);
  const auto toy =
      ad::forward(net::build_toy_net(), ad::ParamVector({0.0, 0.0}), ad::SequenceBatch::from_rows({{1.0, 1.0}}));
  const auto j = ad::jvp(toy.tape, std::vector<double>{1.0, 1.0});
  EXPECT_DOUBLE_EQ(j.step(0)(0, 0), 100.0);
  EXPECT_NEAR(j.step(0)(0, 1), 0.1, 1e-15);
}

TEST(Jvp, MatchesCentralDifferencesOnRnn) {
  const auto arch = small_rnn(8);
  Rng rng(8);
  const auto w = random_params(arch, rng);
  const auto x = random_batch(6, 2, 2, rng);
  const auto v = gaussian_vector(w.size(), 1.0, rng);
  const auto j = flatten(ad::jvp(ad::forward(arch, w, x).tape, v));
  EXPECT_LE(rel_error(j, fd_jvp(arch, w, x, v)), 1e-5);
}

TEST(Jvp, TransposeIdentityOnEverySupportedArchitecture) {
  std::vector<ad::ArchitectureSpec> archs = {tanh_mlp(), small_rnn(), small_residual(),
                                             net::build_parity_net(), net::build_maze_net(),
                                             net::build_toy_net(), net::build_linear_net()};
  for (const auto& arch : archs) {
    for (std::uint64_t trial = 0; trial < 3; ++trial) {
      Rng rng(100 + trial);
      const auto w = random_params(arch, rng, 0.2);
      const std::size_t length = arch.is_recurrent() ? 4 : 1;
      const auto x = random_batch(length, 3, arch.input_width, rng);
      const auto seed = random_batch(length, 3, arch.output_width, rng);
      const auto v = gaussian_vector(w.size(), 1.0, rng);
      const auto fwd = ad::forward(arch, w, x);
      const double lhs = dot(seed, ad::jvp(fwd.tape, v));
      const double rhs = ad::dot(ad::vjp(fwd.tape, seed), v);
      EXPECT_LE(std::abs(lhs - rhs), 1e-10 * std::max({std::abs(lhs), std::abs(rhs), 1e-300})) << arch.id;
    }
  }
}

TEST(Jvp, TransposeIdentityOnLargeResidualNet) {
  const auto arch = net::build_residual_net(32);
  Rng rng(9);
  ad::ParamVector w(gaussian_vector(ad::param_count(arch), 0.02, rng));
  const auto x = random_batch(1, 2, arch.input_width, rng);
  const auto seed = random_batch(1, 2, arch.output_width, rng);
  const auto v = gaussian_vector(w.size(), 1.0, rng);
  const auto fwd = ad::forward(arch, w, x);
  const double lhs = dot(seed, ad::jvp(fwd.tape, v));
  const double rhs = ad::dot(ad::vjp(fwd.tape, seed), v);
  EXPECT_LE(std::abs(lhs - rhs), 1e-10 * std::max(std::abs(lhs), std::abs(rhs)));
}
