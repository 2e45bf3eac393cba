#include "safemut/harness/robustness.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <ostream>

#include "csv.hpp"
#include "safemut/errors.hpp"
#include "safemut/mutation/operators.hpp"
#include "safemut/random.hpp"

namespace safemut::harness {

using detail::format_double;

RobustnessResult robustness_analysis(const evolution::Domain& domain, std::span<const net::Genome> solutions,
                                     std::span<const mutation::MutationConfig> probes,
                                     std::size_t n_perturb, std::uint64_t seed) {
  if (probes.empty()) throw ConfigError("robustness analysis needs at least one probe");
  if (n_perturb == 0) throw ConfigError("robustness analysis needs at least one perturbation");
  for (const auto& p : probes) p.validate();
  const auto& arch = domain.architecture();

  RobustnessResult result;
  std::vector<std::string> sources;
  std::map<std::pair<std::string, std::size_t>, std::pair<double, std::size_t>> sums;

  for (std::size_t s = 0; s < solutions.size(); ++s) {
    const auto& genome = solutions[s];
    if (genome.params.size() != ad::param_count(arch)) {
      throw PreconditionError("solution " + std::to_string(s) + " does not match architecture " + arch.id);
    }
    const auto parent = domain.evaluate(genome.params);
    if (!parent.solved) throw PreconditionError("solution " + std::to_string(s) + " does not solve " + domain.name());
    const double parent_norm = domain.normalized_fitness(parent.fitness);
    const std::string& source = genome.lineage.method;
    if (std::find(sources.begin(), sources.end(), source) == sources.end()) sources.push_back(source);

    for (std::size_t p = 0; p < probes.size(); ++p) {
      for (std::size_t k = 0; k < n_perturb; ++k) {
        Rng rng = make_rng(seed, {s, p, k});
        RobustnessRow row;
        row.solution = s;
        row.source = source;
        row.probe = probes[p].method;
        row.strength = probes[p].strength;
        row.perturbation = k;
        row.parent_fitness = parent.fitness;
        try {
          const auto child = mutation::mutate(arch, genome.params, parent.archive, probes[p], rng);
          row.child_fitness = domain.evaluate(child.child).fitness;
          row.retained = parent_norm > 0.0
                             ? std::clamp(domain.normalized_fitness(row.child_fitness) / parent_norm, 0.0, 1.0)
                             : 0.0;
        } catch (const NumericError&) {
          // A perturbation that blows up the network retains nothing.
          row.child_fitness = std::numeric_limits<double>::quiet_NaN();
          row.retained = 0.0;
        }
        auto& acc = sums[{source, p}];
        acc.first += row.retained;
        ++acc.second;
        result.rows.push_back(std::move(row));
      }
    }
  }

  for (const auto& source : sources) {
    for (std::size_t p = 0; p < probes.size(); ++p) {
      const auto& [sum, n] = sums.at({source, p});
      result.table.push_back({source, probes[p].method, sum / static_cast<double>(n), n});
    }
  }
  return result;
}

std::vector<net::Genome> load_solutions(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw ConfigError("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".genome") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<net::Genome> genomes;
  genomes.reserve(files.size());
  for (const auto& f : files) genomes.push_back(net::load_genome(f));
  return genomes;
}

void write_robustness_csv(std::ostream& out, const RobustnessResult& result) {
  out << "solution,source,probe,strength,perturbation,parent_fitness,child_fitness,retained\n";
  for (const auto& r : result.rows) {
    out << r.solution << ',' << r.source << ',' << mutation::to_string(r.probe) << ',' << format_double(r.strength)
        << ',' << r.perturbation << ',' << format_double(r.parent_fitness) << ','
        << format_double(r.child_fitness) << ',' << format_double(r.retained) << '\n';
  }
}

void write_robustness_table(std::ostream& out, const RobustnessResult& result) {
  out << "source,probe,mean_retained,samples\n";
  for (const auto& c : result.table) {
    out << c.source << ',' << mutation::to_string(c.probe) << ',' << format_double(c.mean_retained) << ','
        << c.samples << '\n';
  }
}

}  // namespace safemut::harness
