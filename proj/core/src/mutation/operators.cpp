#include "safemut/mutation/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "safemut/ad/differentiate.hpp"
#include "safemut/ad/forward.hpp"
#include "safemut/errors.hpp"

namespace safemut::mutation {

namespace {

void require_archive(const ExperienceArchive& archive) {
  if (archive.empty()) throw PreconditionError("experience archive is empty");
  if (archive.inputs.batch() != archive.outputs.batch() ||
      archive.inputs.length() != archive.outputs.length()) {
    throw ConfigError("archive inputs and outputs disagree in shape");
  }
}

void require_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw NumericError(std::string("non-finite ") + what);
  }
}

/// Root-sum-of-squares accumulator over outputs.
void add_squared(std::vector<double>& acc, std::span<const double> g, double scale) {
  for (std::size_t p = 0; p < acc.size(); ++p) {
    const double v = g[p] * scale;
    acc[p] += v * v;
  }
}

SensitivityVector finish(std::vector<double> acc, SensitivityVariant variant) {
  for (double& a : acc) a = std::sqrt(a);
  require_finite(acc, "sensitivity");
  return {std::move(acc), variant};
}

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

}  // namespace

double divergence(const ad::ArchitectureSpec& arch, const ad::ParamVector& params,
                  std::span<const double> delta, const ExperienceArchive& archive) {
  require_archive(archive);
  const auto perturbed = ad::forward(arch, ad::add(params, delta), archive.inputs);
  const auto& y = perturbed.outputs;
  if (y.width() != archive.outputs.width()) throw ConfigError("archive output width mismatch");
  double sum = 0.0;
  for (std::size_t t = 0; t < y.length(); ++t) {
    auto a = archive.outputs.step(t).flat();
    auto b = y.step(t).flat();
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = a[i] - b[i];
      sum += d * d;
    }
  }
  return sum / static_cast<double>(archive.size());
}

MutationResult control_mutate(const ad::ParamVector& params, const MutationConfig& cfg, Rng& rng) {
  cfg.validate();
  MutationResult result;
  result.perturbation.delta = gaussian_vector(params.size(), cfg.strength, rng);
  result.child = ad::add(params, result.perturbation.delta);
  result.report.method = Method::kControl;
  result.report.divergence = nan();
  return result;
}

SensitivityVector sensitivity_abs(const ad::ArchitectureSpec& arch, const ad::ParamVector& params,
                                  const ExperienceArchive& archive) {
  require_archive(archive);
  const auto fwd = ad::forward(arch, params, archive.inputs);
  const std::size_t n_exp = archive.size();
  const std::size_t steps = fwd.outputs.length();
  const std::size_t units = fwd.outputs.width();
  std::vector<double> acc(params.size(), 0.0);
  std::vector<double> abs_sum(params.size());
  ad::SequenceBatch seed(steps, n_exp, units);
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t k = 0; k < units; ++k) {
      for (std::size_t i = 0; i < n_exp; ++i) seed.step(t)(i, k) = 1.0;
      std::fill(abs_sum.begin(), abs_sum.end(), 0.0);
      // Rows are independent, so each row's gradient is the one-hot (i, k) vjp.
      ad::vjp_per_row(fwd.tape, seed, [&](std::size_t, std::span<const double> g) {
        for (std::size_t p = 0; p < g.size(); ++p) abs_sum[p] += std::abs(g[p]);
      });
      add_squared(acc, abs_sum, 1.0 / static_cast<double>(n_exp));
      for (std::size_t i = 0; i < n_exp; ++i) seed.step(t)(i, k) = 0.0;
    }
  }
  return finish(std::move(acc), SensitivityVariant::kAbs);
}

SensitivityVector sensitivity_sum(const ad::ArchitectureSpec& arch, const ad::ParamVector& params,
                                  const ExperienceArchive& archive) {
  require_archive(archive);
  const auto fwd = ad::forward(arch, params, archive.inputs);
  const std::size_t n_exp = archive.size();
  const std::size_t steps = fwd.outputs.length();
  const std::size_t units = fwd.outputs.width();
  std::vector<double> acc(params.size(), 0.0);
  ad::SequenceBatch seed(steps, n_exp, units);
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t k = 0; k < units; ++k) {
      for (std::size_t i = 0; i < n_exp; ++i) seed.step(t)(i, k) = 1.0;
      add_squared(acc, ad::vjp(fwd.tape, seed), 1.0);
      for (std::size_t i = 0; i < n_exp; ++i) seed.step(t)(i, k) = 0.0;
    }
  }
  return finish(std::move(acc), SensitivityVariant::kSum);
}

std::vector<double> divergence_hvp(const ad::ArchitectureSpec& arch, const ad::ParamVector& params,
                                   const ExperienceArchive& archive, std::span<const double> v) {
  require_archive(archive);
  if (v.size() != params.size()) throw ConfigError("hvp vector length != parameter count");
  const auto fwd = ad::forward(arch, params, archive.inputs);
  auto hv = ad::vjp(fwd.tape, ad::jvp(fwd.tape, v));
  const double scale = 2.0 / static_cast<double>(archive.size());
  for (double& x : hv) x *= scale;
  require_finite(hv, "Hessian-vector product");
  return hv;
}

SensitivityVector sensitivity_so(const ad::ArchitectureSpec& arch, const ad::ParamVector& params,
                                 const ExperienceArchive& archive, const Perturbation& delta0) {
  auto hv = divergence_hvp(arch, params, archive, delta0.delta);
  for (double& x : hv) x = std::sqrt(std::abs(x));
  return {std::move(hv), SensitivityVariant::kSo};
}

std::vector<double> reshape_perturbation(std::span<const double> raw, const SensitivityVector& s,
                                         double epsilon, std::size_t* clamp_count) {
  if (raw.size() != s.values.size()) throw ConfigError("sensitivity length != perturbation length");
  std::vector<double> out(raw.size());
  std::size_t clamped = 0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    double denom = s.values[i];
    if (!(denom >= epsilon)) {
      denom = epsilon;
      ++clamped;
    }
    out[i] = raw[i] / denom;
  }
  if (clamp_count) *clamp_count = clamped;
  return out;
}

MutationResult smg_mutate(const ad::ArchitectureSpec& arch, const ad::ParamVector& params,
                          const ExperienceArchive& archive, const MutationConfig& cfg, Rng& rng) {
  cfg.validate();
  if (!is_gradient_method(cfg.method)) throw ConfigError("smg_mutate needs an SM-G method");
  require_archive(archive);
  Perturbation raw{gaussian_vector(params.size(), cfg.strength, rng), std::nullopt, std::nullopt};

  SensitivityVector s;
  switch (cfg.method) {
    case Method::kSmgAbs: s = sensitivity_abs(arch, params, archive); break;
    case Method::kSmgSum: s = sensitivity_sum(arch, params, archive); break;
    default: {
      const bool all_zero =
          std::all_of(raw.delta.begin(), raw.delta.end(), [](double x) { return x == 0.0; });
      if (all_zero) {
        MutationResult fallback;
        fallback.perturbation = std::move(raw);
        fallback.child = params;
        fallback.report.method = cfg.method;
        fallback.report.fell_back_to_control = true;
        // The zero draw is itself the control offspring.
        fallback.report.divergence = cfg.measure_divergence ? 0.0 : nan();
        return fallback;
      }
      s = sensitivity_so(arch, params, archive, raw);
      break;
    }
  }

  MutationResult result;
  result.report.method = cfg.method;
  result.perturbation.delta = reshape_perturbation(raw.delta, s, cfg.epsilon_clamp, &result.report.clamp_count);
  result.child = ad::add(params, result.perturbation.delta);
  result.report.divergence =
      cfg.measure_divergence ? divergence(arch, params, result.perturbation.delta, archive) : nan();
  return result;
}

LineSearchResult rescale_to_divergence(const ad::ArchitectureSpec& arch, const ad::ParamVector& params,
                                       std::span<const double> direction,
                                       const ExperienceArchive& archive, double target,
                                       const LineSearchConfig& cfg) {
  if (!(target > 0.0)) throw ConfigError("target divergence must be positive");
  std::vector<double> scaled(direction.size());
  LineSearchResult best;
  double best_gap = std::numeric_limits<double>::infinity();

  auto probe = [&](double m) {
    for (std::size_t i = 0; i < scaled.size(); ++i) scaled[i] = m * direction[i];
    double d = 0.0;
    try {
      d = divergence(arch, params, scaled, archive);
    } catch (const NumericError&) {
      // An overflowing child is treated as arbitrarily divergent.
      d = std::numeric_limits<double>::infinity();
    }
    ++best.iterations;
    const double gap = std::abs(d - target) / target;
    if (gap < best_gap) {
      best_gap = gap;
      best.magnitude = m;
      best.divergence = d;
    }
    return d;
  };
  auto done = [&] {
    best.converged = best_gap <= cfg.rel_tol;
    return best.converged;
  };

  double lo = 0.0;
  double hi = cfg.initial_magnitude;
  double d = probe(hi);
  if (done()) return best;
  if (d < target) {
    bool bracketed = false;
    for (int i = 0; i < cfg.max_doublings; ++i) {
      lo = hi;
      hi *= 2.0;
      d = probe(hi);
      if (done()) return best;
      if (d > target) {
        bracketed = true;
        break;
      }
    }
    if (!bracketed) return best;
  }
  for (int i = 0; i < cfg.max_iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    d = probe(mid);
    if (done()) return best;
    (d < target ? lo : hi) = mid;
  }
  return best;
}

MutationResult smr_mutate(const ad::ArchitectureSpec& arch, const ad::ParamVector& params,
                          const ExperienceArchive& archive, const MutationConfig& cfg, Rng& rng) {
  cfg.validate();
  require_archive(archive);
  auto direction = gaussian_vector(params.size(), 1.0, rng);
  const auto search = rescale_to_divergence(arch, params, direction, archive, cfg.strength, cfg.line_search);

  MutationResult result;
  result.perturbation.delta.resize(direction.size());
  for (std::size_t i = 0; i < direction.size(); ++i) {
    result.perturbation.delta[i] = search.magnitude * direction[i];
  }
  result.perturbation.magnitude = search.magnitude;
  result.perturbation.direction = std::move(direction);
  result.child = ad::add(params, result.perturbation.delta);
  result.report.method = Method::kSmR;
  result.report.divergence = search.divergence;
  result.report.line_search_iterations = search.iterations;
  result.report.line_search_converged = search.converged;
  return result;
}

MutationResult mutate(const ad::ArchitectureSpec& arch, const ad::ParamVector& params,
                      const ExperienceArchive& archive, const MutationConfig& cfg, Rng& rng) {
  switch (cfg.method) {
    case Method::kControl: {
      auto result = control_mutate(params, cfg, rng);
      if (cfg.measure_divergence && !archive.empty()) {
        result.report.divergence = divergence(arch, params, result.perturbation.delta, archive);
      }
      return result;
    }
    case Method::kSmR: return smr_mutate(arch, params, archive, cfg, rng);
    default: return smg_mutate(arch, params, archive, cfg, rng);
  }
}

}  // namespace safemut::mutation
