#include "safemut/mutation/archive.hpp"

#include <vector>

#include "safemut/errors.hpp"

namespace safemut::mutation {

ExperienceArchive subsample(const ExperienceArchive& archive, std::size_t cap) {
  if (cap == 0) throw ConfigError("archive cap must be positive");
  const std::size_t n = archive.size();
  if (n <= cap) return archive;
  std::vector<std::size_t> rows(cap);
  for (std::size_t i = 0; i < cap; ++i) rows[i] = i * n / cap;
  return {archive.inputs.select_rows(rows), archive.outputs.select_rows(rows)};
}

}  // namespace safemut::mutation
