#include "safemut/net/genome.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "safemut/errors.hpp"

namespace safemut::net {

void write_genome(std::ostream& out, const Genome& genome) {
  out << "arch " << genome.arch_id << '\n'
      << "id " << genome.id << '\n'
      << "method " << genome.lineage.method << '\n'
      << "parent " << genome.lineage.parent_id << '\n'
      << "count " << genome.params.size() << '\n';
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (double v : genome.params.values()) out << v << '\n';
}

Genome read_genome(std::istream& in) {
  Genome g;
  std::size_t count = 0;
  bool have_count = false;
  std::string line;
  while (!have_count && std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string key;
    fields >> key;
    if (key == "arch") {
      fields >> g.arch_id;
    } else if (key == "id") {
      fields >> g.id;
    } else if (key == "method") {
      fields >> g.lineage.method;
    } else if (key == "parent") {
      fields >> g.lineage.parent_id;
    } else if (key == "count") {
      fields >> count;
      have_count = true;
    } else {
      throw ConfigError("genome file: unexpected header '" + key + "'");
    }
    if (fields.fail()) throw ConfigError("genome file: malformed header line '" + line + "'");
  }
  if (!have_count || g.arch_id.empty()) throw ConfigError("genome file: missing arch or count header");
  std::vector<double> values;
  values.reserve(count);
  while (values.size() < count && std::getline(in, line)) {
    if (line.empty()) continue;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
    if (ec != std::errc()) throw ConfigError("genome file: bad value '" + line + "'");
    values.push_back(v);
  }
  if (values.size() != count) throw ConfigError("genome file: truncated parameter list");
  g.params = ad::ParamVector(std::move(values));
  return g;
}

void save_genome(const std::filesystem::path& path, const Genome& genome) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_genome(out, genome);
}

Genome load_genome(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read genome file " + path.string());
  return read_genome(in);
}

}  // namespace safemut::net
