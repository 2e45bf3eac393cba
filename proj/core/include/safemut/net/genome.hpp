#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "safemut/ad/param_vector.hpp"

namespace safemut::net {

struct Lineage {
  std::int64_t parent_id = -1;
  std::string method = "init";
};

/// The unit of evolution: a flat parameter vector plus the id of the
/// architecture it belongs to.
struct Genome {
  ad::ParamVector params;
  std::string arch_id;
  std::uint64_t id = 0;
  Lineage lineage;
};

/// Plain text: "arch <id>", "method <tag>", "parent <id>", "count <n>" header
/// lines followed by one value per line at full precision.
void write_genome(std::ostream& out, const Genome& genome);
Genome read_genome(std::istream& in);

void save_genome(const std::filesystem::path& path, const Genome& genome);
Genome load_genome(const std::filesystem::path& path);

}  // namespace safemut::net
