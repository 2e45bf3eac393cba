#pragma once

#include <array>
#include <string_view>
#include <vector>

#include "safemut/evolution/domain.hpp"

namespace safemut::domains {

enum class ToyKind { kEasy, kMedium, kWashout };

std::string_view to_string(ToyKind kind);
ToyKind parse_toy_kind(std::string_view name);

struct ToyExample {
  std::array<double, 2> input;
  std::array<double, 2> target;
};

/// Poorly conditioned two-weight model y0 = 100 w0 x0, y1 = 0.1 w1 x1 and
/// the examples it must memorize.
struct ToyTask {
  ToyKind kind = ToyKind::kEasy;
  std::vector<ToyExample> examples;

  static ToyTask make(ToyKind kind);
};

/// Solved once the summed squared error is at most this.
inline constexpr double kToySolvedError = 1e-4;

/// fitness = -sum of squared output errors; the archive holds every example input.
evolution::EvalRecord toy_eval(const ToyTask& task, const ad::ParamVector& params);

class ToyDomain final : public evolution::Domain {
 public:
  explicit ToyDomain(ToyKind kind);

  std::string name() const override;
  const ad::ArchitectureSpec& architecture() const override { return arch_; }
  evolution::EvalRecord evaluate(const ad::ParamVector& params) const override;
  /// 1 / (1 - fitness).
  double normalized_fitness(double fitness) const override;

  const ToyTask& task() const { return task_; }

 private:
  ToyTask task_;
  ad::ArchitectureSpec arch_;
};

}  // namespace safemut::domains
