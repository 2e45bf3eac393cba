#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "safemut/evolution/domain.hpp"
#include "safemut/mutation/config.hpp"
#include "safemut/net/genome.hpp"

namespace safemut::harness {

struct RobustnessRow {
  std::size_t solution = 0;
  std::string source;  // method that evolved the solution
  mutation::Method probe = mutation::Method::kControl;
  double strength = 0.0;
  std::size_t perturbation = 0;
  double parent_fitness = 0.0;
  double child_fitness = 0.0;
  double retained = 0.0;
};

struct RobustnessCell {
  std::string source;
  mutation::Method probe = mutation::Method::kControl;
  double mean_retained = 0.0;
  std::size_t samples = 0;
};

struct RobustnessResult {
  std::vector<RobustnessRow> rows;
  /// Mean retained fraction per (source method, probe), sources in first-seen order.
  std::vector<RobustnessCell> table;
};

/// Retained performance = clamp(normalized child fitness / normalized parent
/// fitness, 0, 1). Every solution must solve the domain (PreconditionError
/// otherwise). Perturbation k of solution s under probe p uses the stream
/// derive_seed(seed, {s, p, k}).
RobustnessResult robustness_analysis(const evolution::Domain& domain, std::span<const net::Genome> solutions,
                                     std::span<const mutation::MutationConfig> probes,
                                     std::size_t n_perturb, std::uint64_t seed);

/// Genome files (*.genome) in a directory, by file name.
std::vector<net::Genome> load_solutions(const std::filesystem::path& dir);

/// Columns: solution,source,probe,strength,perturbation,parent_fitness,child_fitness,retained
void write_robustness_csv(std::ostream& out, const RobustnessResult& result);
/// Columns: source,probe,mean_retained,samples
void write_robustness_table(std::ostream& out, const RobustnessResult& result);

}  // namespace safemut::harness
