#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "helpers.hpp"
#include "safemut/ad/forward.hpp"
#include "safemut/domains/toy.hpp"
#include "safemut/errors.hpp"
#include "safemut/mutation/operators.hpp"
#include "safemut/net/architectures.hpp"

using namespace safemut;
using namespace safemut::testing;
using mutation::Method;

namespace {

mutation::ExperienceArchive toy_archive(domains::ToyKind kind, const ad::ParamVector& w) {
  return domains::toy_eval(domains::ToyTask::make(kind), w).archive;
}

mutation::MutationConfig config(Method m, double strength) {
  mutation::MutationConfig c;
  c.method = m;
  c.strength = strength;
  return c;
}

}  // namespace

TEST(Divergence, ZeroForZeroDeltaOnEveryArchitecture) {
  for (const auto& arch : {tanh_mlp(), small_rnn(), net::build_parity_net(), net::build_maze_net()}) {
    Rng rng(1);
    const auto w = random_params(arch, rng, 0.3);
    const auto archive = archive_for(arch, w, random_batch(arch.is_recurrent() ? 4 : 1, 6, arch.input_width, rng));
    EXPECT_EQ(mutation::divergence(arch, w, std::vector<double>(w.size(), 0.0), archive), 0.0) << arch.id;
  }
}

TEST(Divergence, LinearNetHandValue) {
  const auto arch = net::build_linear_net();
  const ad::ParamVector w({1.0});
  const auto archive = archive_for(arch, w, ad::SequenceBatch::from_rows({{1.0}, {2.0}}));
  EXPECT_DOUBLE_EQ(mutation::divergence(arch, w, std::vector<double>{0.5}, archive), 0.625);
}

TEST(Divergence, NonNegative) {
  const auto arch = small_rnn();
  Rng rng(2);
  const auto w = random_params(arch, rng);
  const auto archive = archive_for(arch, w, random_batch(3, 4, 2, rng));
  for (int i = 0; i < 20; ++i) {
    EXPECT_GE(mutation::divergence(arch, w, gaussian_vector(w.size(), 0.3, rng), archive), 0.0);
  }
}

TEST(Config, StrengthMustBePositive) {
  EXPECT_THROW(config(Method::kControl, 0.0).validate(), ConfigError);
  EXPECT_THROW(config(Method::kSmR, -1.0).validate(), ConfigError);
  EXPECT_NO_THROW(config(Method::kSmgSo, 1e-3).validate());
}

TEST(Config, MethodNames) {
  for (Method m : {Method::kControl, Method::kSmR, Method::kSmgAbs, Method::kSmgSum, Method::kSmgSo}) {
    EXPECT_EQ(mutation::parse_method(mutation::to_string(m)), m);
  }
  EXPECT_EQ(mutation::parse_method("sm_g_sum"), Method::kSmgSum);
  EXPECT_THROW(mutation::parse_method("SM-G-FOO"), ConfigError);
}

TEST(Control, SampleStdAndDeterminism) {
  const ad::ParamVector w(10000, 1.0);
  Rng rng(5);
  const auto r = mutation::control_mutate(w, config(Method::kControl, 0.02), rng);
  double sq = 0.0;
  for (double d : r.perturbation.delta) sq += d * d;
  EXPECT_NEAR(std::sqrt(sq / 10000.0), 0.02, 0.05 * 0.02);
  for (std::size_t i = 0; i < w.size(); ++i) EXPECT_EQ(r.child[i], 1.0 + r.perturbation.delta[i]);
  Rng again(5);
  EXPECT_EQ(mutation::control_mutate(w, config(Method::kControl, 0.02), again).child, r.child);
}

TEST(Sensitivity, ToySingleExperience) {
  const ad::ParamVector w({0.3, 0.7});
  const auto archive = toy_archive(domains::ToyKind::kMedium, w);
  const auto arch = net::build_toy_net();
  const auto abs = mutation::sensitivity_abs(arch, w, archive);
  const auto sum = mutation::sensitivity_sum(arch, w, archive);
  EXPECT_DOUBLE_EQ(abs.values[0], 100.0);
  EXPECT_NEAR(abs.values[1], 0.1, 1e-15);
  EXPECT_EQ(abs.values, sum.values);
}

TEST(Sensitivity, WashoutSeparation) {
  const ad::ParamVector w({0.01, 10.0});
  const auto archive = toy_archive(domains::ToyKind::kWashout, w);
  const auto arch = net::build_toy_net();
  const auto abs = mutation::sensitivity_abs(arch, w, archive);
  const auto sum = mutation::sensitivity_sum(arch, w, archive);
  EXPECT_LE(sum.values[0], 1e-9);
  EXPECT_NEAR(abs.values[0], 100.0, 1e-9);
}

TEST(Sensitivity, AbsEqualsSumOnAnySingleExperience) {
  for (const auto& arch : {tanh_mlp(), small_rnn()}) {
    Rng rng(6);
    const auto w = random_params(arch, rng);
    const auto archive = archive_for(arch, w, random_batch(arch.is_recurrent() ? 3 : 1, 1, arch.input_width, rng));
    const auto abs = mutation::sensitivity_abs(arch, w, archive);
    const auto sum = mutation::sensitivity_sum(arch, w, archive);
    EXPECT_LE(rel_error(abs.values, sum.values), 1e-12) << arch.id;
    for (double s : abs.values) EXPECT_GE(s, 0.0);
  }
}

TEST(Sensitivity, EmptyArchiveIsPreconditionError) {
  const auto arch = net::build_toy_net();
  const ad::ParamVector w({1.0, 1.0});
  const mutation::ExperienceArchive empty;
  EXPECT_THROW(mutation::sensitivity_abs(arch, w, empty), PreconditionError);
  Rng rng(1);
  EXPECT_THROW(mutation::smg_mutate(arch, w, empty, config(Method::kSmgSum, 0.1), rng), PreconditionError);
  EXPECT_THROW(mutation::smr_mutate(arch, w, empty, config(Method::kSmR, 0.1), rng), PreconditionError);
}

TEST(Hvp, ToyGaussNewtonValues) {
  const ad::ParamVector w({0.2, -0.4});
  const auto archive = toy_archive(domains::ToyKind::kMedium, w);
  const auto arch = net::build_toy_net();
  const auto hv = mutation::divergence_hvp(arch, w, archive, std::vector<double>{1.0, 1.0});
  EXPECT_NEAR(hv[0], 20000.0, 1e-9);
  EXPECT_NEAR(hv[1], 0.02, 1e-15);
  const auto zero = mutation::divergence_hvp(arch, w, archive, std::vector<double>{0.0, 0.0});
  EXPECT_EQ(zero, (std::vector<double>{0.0, 0.0}));

  const auto so = mutation::sensitivity_so(arch, w, archive, {{1.0, 1.0}, std::nullopt, std::nullopt});
  EXPECT_NEAR(so.values[0], std::sqrt(20000.0), 1e-9);
  EXPECT_NEAR(so.values[1], std::sqrt(0.02), 1e-12);
}

TEST(Hvp, MatchesFiniteDifferenceOfDivergenceGradient) {
  // d/de grad D(e v) at e = 0, with grad D from central differences in
  // each coordinate: a second-order central-difference oracle.
  for (const auto& arch : {tanh_mlp(2, 4, 2), small_rnn(3)}) {
    Rng rng(13);
    const auto w = random_params(arch, rng);
    const auto archive = archive_for(arch, w, random_batch(arch.is_recurrent() ? 3 : 1, 4, arch.input_width, rng));
    const auto v = gaussian_vector(w.size(), 1.0, rng);
    const auto hv = mutation::divergence_hvp(arch, w, archive, v);

    const double h = 1e-4;
    auto div = [&](double along_v, std::size_t p, double along_p) {
      std::vector<double> d(w.size());
      for (std::size_t i = 0; i < d.size(); ++i) d[i] = along_v * v[i];
      d[p] += along_p;
      return mutation::divergence(arch, w, d, archive);
    };
    std::vector<double> fd(w.size());
    for (std::size_t p = 0; p < w.size(); ++p) {
      fd[p] = (div(h, p, h) - div(h, p, -h) - div(-h, p, h) + div(-h, p, -h)) / (4.0 * h * h);
    }
    EXPECT_LE(rel_error(hv, fd), 1e-3) << arch.id;
  }
}

TEST(Reshape, DividesAndClamps) {
  mutation::SensitivityVector s{{100.0, 0.1, 0.0, 1e-12}, mutation::SensitivityVariant::kAbs};
  std::size_t clamped = 0;
  const auto out = mutation::reshape_perturbation(std::vector<double>{0.1, 0.1, 1e-9, 1e-9}, s, 1e-8, &clamped);
  EXPECT_DOUBLE_EQ(out[0], 0.001);
  EXPECT_DOUBLE_EQ(out[1], 1.0);
  EXPECT_DOUBLE_EQ(out[2], 0.1);
  EXPECT_DOUBLE_EQ(out[3], 0.1);
  EXPECT_EQ(clamped, 2u);
}

TEST(Reshape, ZeroSecondOrderSensitivityIsFullyClamped) {
  const ad::ParamVector w({0.2, -0.4});
  const auto archive = toy_archive(domains::ToyKind::kMedium, w);
  const auto so = mutation::sensitivity_so(net::build_toy_net(), w, archive, {{0.0, 0.0}, std::nullopt, std::nullopt});
  EXPECT_EQ(so.values, (std::vector<double>{0.0, 0.0}));
  std::size_t clamped = 0;
  mutation::reshape_perturbation(std::vector<double>{0.0, 0.0}, so, 1e-8, &clamped);
  EXPECT_EQ(clamped, 2u);
}

TEST(SmG, AbsShrinksSensitiveWeightOnMediumTask) {
  const ad::ParamVector w({0.0, 0.0});
  const auto archive = toy_archive(domains::ToyKind::kMedium, w);
  const auto s = mutation::sensitivity_abs(net::build_toy_net(), w, archive);
  const auto adjusted = mutation::reshape_perturbation(std::vector<double>{0.1, 0.1}, s, 1e-8);
  EXPECT_NEAR(adjusted[0], 0.001, 1e-15);
  EXPECT_NEAR(adjusted[1], 1.0, 1e-12);
  EXPECT_NEAR(adjusted[1] / adjusted[0], 1000.0, 1e-6);
}

TEST(SmG, UniformSensitivityPreservesDirection) {
  // Identity dense layer without bias on orthonormal inputs: every weight
  // has the same sensitivity.
  ad::ArchitectureSpec arch;
  arch.id = "identity3";
  arch.input_width = 3;
  arch.output_width = 3;
  arch.layers = {ad::DenseLayer{3, 3, ad::Activation::kIdentity, false}};
  Rng rng(3);
  const auto w = random_params(arch, rng);
  const auto archive = archive_for(arch, w, ad::SequenceBatch::from_rows({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}));
  for (Method m : {Method::kSmgAbs, Method::kSmgSum}) {
    Rng a(17);
    const auto r = mutation::smg_mutate(arch, w, archive, config(m, 0.1), a);
    Rng b(17);
    const auto raw = gaussian_vector(w.size(), 0.1, b);
    const double ratio = r.perturbation.delta[0] / raw[0];
    for (std::size_t i = 0; i < raw.size(); ++i) EXPECT_NEAR(r.perturbation.delta[i], ratio * raw[i], 1e-12);
  }
}

TEST(SmG, DeterministicAndParentUntouched) {
  const auto arch = small_rnn();
  Rng rng(4);
  const auto w = random_params(arch, rng);
  const auto copy = w;
  const auto archive = archive_for(arch, w, random_batch(4, 5, 2, rng));
  for (Method m : {Method::kSmgAbs, Method::kSmgSum, Method::kSmgSo, Method::kSmR, Method::kControl}) {
    Rng a(99);
    Rng b(99);
    const auto r1 = mutation::mutate(arch, w, archive, config(m, 0.01), a);
    const auto r2 = mutation::mutate(arch, w, archive, config(m, 0.01), b);
    EXPECT_EQ(r1.child, r2.child) << mutation::to_string(m);
    EXPECT_EQ(r1.child.size(), w.size());
    EXPECT_EQ(w, copy);
    EXPECT_TRUE(std::isfinite(r1.report.divergence)) << mutation::to_string(m);
  }
}

TEST(SmR, LinearNetMagnitude) {
  const auto arch = net::build_linear_net();
  const ad::ParamVector w({1.0});
  const auto archive = archive_for(arch, w, ad::SequenceBatch::from_rows({{1.0}}));
  mutation::LineSearchConfig ls;
  ls.rel_tol = 1e-9;
  ls.max_iters = 200;
  const auto r = mutation::rescale_to_divergence(arch, w, std::vector<double>{1.0}, archive, 0.25, ls);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.magnitude, 0.5, 1e-8);
  // With the default tolerance the realized divergence is within 5%.
  const auto d = mutation::rescale_to_divergence(arch, w, std::vector<double>{1.0}, archive, 0.25, {});
  EXPECT_LE(std::abs(d.divergence - 0.25) / 0.25, 0.05);
}

TEST(SmR, RealizedDivergenceWithinToleranceOnRandomNets) {
  const auto arch = tanh_mlp();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const auto w = random_params(arch, rng);
    const auto archive = archive_for(arch, w, random_batch(1, 8, 3, rng));
    const auto cfg = config(Method::kSmR, 0.01);
    const auto r = mutation::smr_mutate(arch, w, archive, cfg, rng);
    ASSERT_TRUE(r.report.line_search_converged);
    const double d = mutation::divergence(arch, w, r.perturbation.delta, archive);
    EXPECT_LE(std::abs(d - 0.01) / 0.01, 0.05);
    ASSERT_TRUE(r.perturbation.magnitude && r.perturbation.direction);
    for (std::size_t i = 0; i < w.size(); ++i) {
      EXPECT_DOUBLE_EQ(r.perturbation.delta[i], *r.perturbation.magnitude * (*r.perturbation.direction)[i]);
    }
  }
}

TEST(SmR, UnreachableTargetFlaggedNotThrown) {
  // A sigmoid output can move by at most 1, so divergence is bounded.
  ad::ArchitectureSpec arch;
  arch.id = "sig";
  arch.input_width = 1;
  arch.output_width = 1;
  arch.layers = {ad::DenseLayer{1, 1, ad::Activation::kSigmoid}};
  const ad::ParamVector w({0.0, 0.0});
  const auto archive = archive_for(arch, w, ad::SequenceBatch::from_rows({{1.0}}));
  Rng rng(1);
  const auto r = mutation::smr_mutate(arch, w, archive, config(Method::kSmR, 5.0), rng);
  EXPECT_FALSE(r.report.line_search_converged);
  EXPECT_EQ(r.child.size(), 2u);
}
