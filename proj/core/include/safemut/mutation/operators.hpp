#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "safemut/ad/architecture.hpp"
#include "safemut/ad/param_vector.hpp"
#include "safemut/mutation/archive.hpp"
#include "safemut/mutation/config.hpp"
#include "safemut/random.hpp"

namespace safemut::mutation {

struct Perturbation {
  std::vector<double> delta;
  std::optional<std::vector<double>> direction;
  std::optional<double> magnitude;
};

enum class SensitivityVariant { kAbs, kSum, kSo };

struct SensitivityVector {
  std::vector<double> values;
  SensitivityVariant variant = SensitivityVariant::kAbs;
};

struct MutationReport {
  Method method = Method::kControl;
  /// Divergence of the child against the archive; NaN when not measured.
  double divergence = 0.0;
  int line_search_iterations = 0;
  bool line_search_converged = true;
  std::size_t clamp_count = 0;
  bool fell_back_to_control = false;
};

struct MutationResult {
  ad::ParamVector child;
  Perturbation perturbation;
  MutationReport report;
};

/// Mean over experiences of the squared output difference between params and
/// params + delta, summed over output units (and timesteps for sequences).
double divergence(const ad::ArchitectureSpec& arch, const ad::ParamVector& params,
                  std::span<const double> delta, const ExperienceArchive& archive);

/// child = params + N(0, strength^2) noise on every coordinate.
MutationResult control_mutate(const ad::ParamVector& params, const MutationConfig& cfg, Rng& rng);

/// sqrt(sum_k (mean_i |d y_ik / d w|)^2). One backward pass per experience and
/// output; for sequence archives k runs over (unit, timestep) pairs.
SensitivityVector sensitivity_abs(const ad::ArchitectureSpec& arch, const ad::ParamVector& params,
                                  const ExperienceArchive& archive);

/// sqrt(sum_k (sum_i d y_ik / d w)^2), one backward pass per output.
SensitivityVector sensitivity_sum(const ad::ArchitectureSpec& arch, const ad::ParamVector& params,
                                  const ExperienceArchive& archive);

/// Hessian of the divergence with respect to the perturbation at zero, times
/// v. At zero the residuals vanish and the Hessian is the Gauss-Newton
/// matrix (2/I) sum_i J_i^T J_i, evaluated as a jvp followed by a vjp.
std::vector<double> divergence_hvp(const ad::ArchitectureSpec& arch, const ad::ParamVector& params,
                                   const ExperienceArchive& archive, std::span<const double> v);

/// sqrt(|H delta0|) elementwise.
SensitivityVector sensitivity_so(const ad::ArchitectureSpec& arch, const ad::ParamVector& params,
                                 const ExperienceArchive& archive, const Perturbation& delta0);

/// raw / max(s, epsilon) elementwise; clamp_count receives the number of
/// entries that hit the floor.
std::vector<double> reshape_perturbation(std::span<const double> raw, const SensitivityVector& s,
                                         double epsilon, std::size_t* clamp_count = nullptr);

/// Gaussian draw reshaped by the variant's sensitivity (SM-G-ABS, -SUM, -SO).
MutationResult smg_mutate(const ad::ArchitectureSpec& arch, const ad::ParamVector& params,
                          const ExperienceArchive& archive, const MutationConfig& cfg, Rng& rng);

struct LineSearchResult {
  double magnitude = 0.0;
  double divergence = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Finds a magnitude m with divergence(m * direction) within rel_tol of
/// target: doubling from the initial guess until the target is exceeded,
/// then bisection. Returns the closest magnitude seen if it gives up.
LineSearchResult rescale_to_divergence(const ad::ArchitectureSpec& arch, const ad::ParamVector& params,
                                       std::span<const double> direction,
                                       const ExperienceArchive& archive, double target,
                                       const LineSearchConfig& cfg);

/// Random direction scaled by line search to the configured target divergence.
MutationResult smr_mutate(const ad::ArchitectureSpec& arch, const ad::ParamVector& params,
                          const ExperienceArchive& archive, const MutationConfig& cfg, Rng& rng);

/// Dispatches on cfg.method. The archive may be empty only for the control.
MutationResult mutate(const ad::ArchitectureSpec& arch, const ad::ParamVector& params,
                      const ExperienceArchive& archive, const MutationConfig& cfg, Rng& rng);

}  // namespace safemut::mutation
