#include "safemut/harness/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <utility>

#include "safemut/domains/parity.hpp"
#include "safemut/domains/toy.hpp"
#include "safemut/errors.hpp"
#include "safemut/net/architectures.hpp"

namespace safemut::harness {

using mutation::Method;
using nlohmann::json;

namespace {

bool is_toy(std::string_view domain) { return domain.substr(0, 4) == "toy_"; }

void check_domain(std::string_view domain) {
  if (domain == "parity" || domain == "maze") return;
  if (!is_toy(domain)) throw ConfigError("unknown domain '" + std::string(domain) + "'");
  domains::parse_toy_kind(domain.substr(4));
}

bool is_large_scale(std::string_view arch) { return arch.substr(0, 8) == "residual"; }

/// Strength table keyed by the tuning family a config belongs to.
std::string_view strength_family(std::string_view domain, std::string_view arch) {
  if (is_toy(domain)) return "toy";
  if (domain == "maze" && is_large_scale(arch)) return "large_scale";
  return domain;
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) out = it->get<T>();
}

mutation::MutationConfig mutation_from_json(const json& j, mutation::MutationConfig m) {
  if (auto it = j.find("method"); it != j.end()) m.method = mutation::parse_method(it->get<std::string>());
  read(j, "strength", m.strength);
  read(j, "epsilon_clamp", m.epsilon_clamp);
  read(j, "measure_divergence", m.measure_divergence);
  if (auto ls = j.find("line_search"); ls != j.end()) {
    read(*ls, "initial_magnitude", m.line_search.initial_magnitude);
    read(*ls, "max_doublings", m.line_search.max_doublings);
    read(*ls, "max_iters", m.line_search.max_iters);
    read(*ls, "rel_tol", m.line_search.rel_tol);
  }
  return m;
}

json mutation_to_json(const mutation::MutationConfig& m) {
  return {{"method", std::string(mutation::to_string(m.method))},
          {"strength", m.strength},
          {"epsilon_clamp", m.epsilon_clamp},
          {"measure_divergence", m.measure_divergence},
          {"line_search",
           {{"initial_magnitude", m.line_search.initial_magnitude},
            {"max_doublings", m.line_search.max_doublings},
            {"max_iters", m.line_search.max_iters},
            {"rel_tol", m.line_search.rel_tol}}}};
}

}  // namespace

std::string_view to_string(Algorithm a) {
  return a == Algorithm::kSteadyState ? "steady_state" : "hillclimber";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "steady_state") return Algorithm::kSteadyState;
  if (name == "hillclimber") return Algorithm::kHillClimber;
  throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

double default_strength(std::string_view domain, Method method) {
  static const std::map<std::pair<std::string_view, Method>, double> table = {
      {{"toy", Method::kControl}, 0.01},      {{"toy", Method::kSmR}, 0.5},
      {{"toy", Method::kSmgAbs}, 0.5},        {{"toy", Method::kSmgSum}, 0.5},
      {{"toy", Method::kSmgSo}, 0.5},         {{"parity", Method::kControl}, 0.05},
      {{"parity", Method::kSmR}, 0.005},      {{"parity", Method::kSmgAbs}, 0.001},
      {{"parity", Method::kSmgSum}, 0.001},   {{"parity", Method::kSmgSo}, 0.001},
      {{"maze", Method::kControl}, 0.05},     {{"maze", Method::kSmR}, 0.005},
      {{"maze", Method::kSmgAbs}, 0.005},     {{"maze", Method::kSmgSum}, 0.1},
      {{"maze", Method::kSmgSo}, 0.01},       {{"large_scale", Method::kControl}, 0.01},
      {{"large_scale", Method::kSmgSum}, 0.1}, {{"large_scale", Method::kSmgSo}, 0.01},
  };
  const std::string_view family = is_toy(domain) ? std::string_view("toy") : domain;
  auto it = table.find({family, method});
  if (it == table.end()) {
    throw ConfigError("no tuned strength for " + std::string(mutation::to_string(method)) + " on " +
                      std::string(domain) + "; set mutation.strength explicitly");
  }
  return it->second;
}

ExperimentConfig default_config(std::string_view domain, Method method) {
  ExperimentConfig cfg;
  cfg.domain = std::string(domain);
  cfg.name = cfg.domain;
  cfg.mutation.method = method;
  cfg.mutation.strength = default_strength(domain, method);
  cfg.mutation.measure_divergence = false;
  if (is_toy(domain)) {
    cfg.algorithm = Algorithm::kHillClimber;
    cfg.iterations = 2000;
  } else if (domain == "large_scale") {
    cfg.domain = "maze";
    cfg.architecture = "residual32";
    cfg.name = "large_scale";
    cfg.evolution.population_size = 100;
    cfg.evolution.budget = 50000;
  } else {
    cfg.evolution.population_size = 250;
    cfg.evolution.budget = 100000;
  }
  return cfg;
}

void ExperimentConfig::validate() const {
  check_domain(domain);
  if (!architecture.empty()) net::architecture_by_id(architecture);
  if (domain == "maze" && map.empty()) throw ConfigError("maze experiments need a map file");
  if (n_runs == 0) throw ConfigError("n_runs must be at least 1");
  mutation.validate();
  if (algorithm == Algorithm::kSteadyState) {
    if (evolution.population_size < 2) throw ConfigError("population_size must be at least 2");
    if (evolution.tournament_size == 0 || evolution.tournament_size > evolution.population_size) {
      throw ConfigError("tournament_size must be in [1, population_size]");
    }
    if (evolution.budget <= evolution.population_size) throw ConfigError("budget must exceed population_size");
    if (evolution.curve_interval == 0) throw ConfigError("curve_interval must be positive");
  } else if (iterations == 0) {
    throw ConfigError("iterations must be at least 1");
  }
  if (grid_strengths.empty()) throw ConfigError("grid strengths must not be empty");
  for (double s : grid_strengths) {
    if (!(s > 0.0)) throw ConfigError("grid strengths must be positive");
  }
  if (grid_runs == 0) throw ConfigError("grid runs must be at least 1");
  for (const auto& p : probes) p.validate();
}

ExperimentConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
  static const char* const kKnown[] = {"name",       "domain",      "architecture", "map",        "maze",
                                       "algorithm",  "mutation",    "evolution",    "iterations", "init_sigma",
                                       "n_runs",     "master_seed", "output",       "log_offspring",
                                       "grid",       "robustness",  "parity_fitness"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(std::begin(kKnown), std::end(kKnown), key) == std::end(kKnown)) {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }

  try {
    const std::string domain = j.value("domain", std::string("parity"));
    const std::string arch = j.value("architecture", std::string());
    check_domain(domain);
    Method method = Method::kControl;
    if (auto m = j.find("mutation"); m != j.end() && m->contains("method")) {
      method = mutation::parse_method(m->at("method").get<std::string>());
    }
    const std::string_view family = strength_family(domain, arch);
    ExperimentConfig cfg;
    if (family == "large_scale") {
      cfg = default_config("large_scale", Method::kControl);
    } else {
      cfg = default_config(family == "toy" ? std::string_view(domain) : family, Method::kControl);
    }
    cfg.domain = domain;
    cfg.architecture = arch;
    cfg.mutation.method = method;
    // Only fall back to the tuned table when no strength is given.
    if (auto m = j.find("mutation"); m == j.end() || !m->contains("strength")) {
      cfg.mutation.strength = default_strength(family, method);
    }

    read(j, "name", cfg.name);
    if (auto it = j.find("map"); it != j.end()) {
      std::filesystem::path p = it->get<std::string>();
      cfg.map = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    }
    if (auto m = j.find("maze"); m != j.end()) {
      read(*m, "episode_len", cfg.maze.episode_len);
      read(*m, "cell_size", cfg.maze.cell_size);
      read(*m, "robot_radius", cfg.maze.robot_radius);
      read(*m, "range_max", cfg.maze.range_max);
      read(*m, "v_scale", cfg.maze.v_scale);
      read(*m, "v_max", cfg.maze.v_max);
      read(*m, "turn_scale", cfg.maze.turn_scale);
      read(*m, "turn_max", cfg.maze.turn_max);
      read(*m, "archive_cap", cfg.maze.archive_cap);
      read(*m, "stop_at_goal", cfg.maze.stop_at_goal);
    }
    if (auto it = j.find("parity_fitness"); it != j.end()) {
      cfg.parity_fitness = domains::parse_parity_fitness(it->get<std::string>());
    }
    if (auto it = j.find("algorithm"); it != j.end()) cfg.algorithm = parse_algorithm(it->get<std::string>());
    read(j, "log_offspring", cfg.log_offspring);
    cfg.mutation.measure_divergence = cfg.log_offspring;
    if (auto m = j.find("mutation"); m != j.end()) cfg.mutation = mutation_from_json(*m, cfg.mutation);
    if (auto e = j.find("evolution"); e != j.end()) {
      read(*e, "population_size", cfg.evolution.population_size);
      read(*e, "tournament_size", cfg.evolution.tournament_size);
      read(*e, "budget", cfg.evolution.budget);
      if (auto r = e->find("replacement"); r != e->end()) {
        const auto name = r->get<std::string>();
        if (name == "worst") {
          cfg.evolution.replacement = evolution::Replacement::kWorst;
        } else if (name == "random") {
          cfg.evolution.replacement = evolution::Replacement::kRandom;
        } else {
          throw ConfigError("unknown replacement rule '" + name + "'");
        }
      }
      read(*e, "curve_interval", cfg.evolution.curve_interval);
      read(*e, "max_retries", cfg.evolution.max_retries);
      read(*e, "offspring_batch", cfg.evolution.offspring_batch);
      read(*e, "stop_on_solution", cfg.evolution.stop_on_solution);
    }
    read(j, "iterations", cfg.iterations);
    read(j, "init_sigma", cfg.init_sigma);
    read(j, "n_runs", cfg.n_runs);
    read(j, "master_seed", cfg.master_seed);
    if (auto it = j.find("output"); it != j.end()) cfg.output = it->get<std::string>();
    if (auto g = j.find("grid"); g != j.end()) {
      read(*g, "strengths", cfg.grid_strengths);
      read(*g, "runs", cfg.grid_runs);
    }
    if (auto r = j.find("robustness"); r != j.end()) {
      read(*r, "perturbations", cfg.perturbations);
      if (auto probes = r->find("probes"); probes != r->end()) {
        for (const auto& p : *probes) {
          mutation::MutationConfig probe;
          probe.method = mutation::parse_method(p.at("method").get<std::string>());
          probe.strength = default_strength(family, probe.method);
          probe.measure_divergence = false;
          cfg.probes.push_back(mutation_from_json(p, probe));
        }
      }
    }
    cfg.validate();
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed experiment config: ") + e.what());
  }
}

json to_json(const ExperimentConfig& cfg) {
  json probes = json::array();
  for (const auto& p : cfg.probes) probes.push_back(mutation_to_json(p));
  return {
      {"name", cfg.name},
      {"domain", cfg.domain},
      {"architecture", resolve_architecture(cfg).id},
      {"map", cfg.map.filename().string()},
      {"maze",
       {{"episode_len", cfg.maze.episode_len},
        {"cell_size", cfg.maze.cell_size},
        {"robot_radius", cfg.maze.robot_radius},
        {"range_max", cfg.maze.range_max},
        {"v_scale", cfg.maze.v_scale},
        {"v_max", cfg.maze.v_max},
        {"turn_scale", cfg.maze.turn_scale},
        {"turn_max", cfg.maze.turn_max},
        {"archive_cap", cfg.maze.archive_cap},
        {"stop_at_goal", cfg.maze.stop_at_goal}}},
      {"parity_fitness", std::string(domains::to_string(cfg.parity_fitness))},
      {"algorithm", std::string(to_string(cfg.algorithm))},
      {"mutation", mutation_to_json(cfg.mutation)},
      {"evolution",
       {{"population_size", cfg.evolution.population_size},
        {"tournament_size", cfg.evolution.tournament_size},
        {"budget", cfg.evolution.budget},
        {"replacement", cfg.evolution.replacement == evolution::Replacement::kWorst ? "worst" : "random"},
        {"curve_interval", cfg.evolution.curve_interval},
        {"max_retries", cfg.evolution.max_retries},
        {"offspring_batch", cfg.evolution.offspring_batch},
        {"stop_on_solution", cfg.evolution.stop_on_solution}}},
      {"iterations", cfg.iterations},
      {"init_sigma", cfg.init_sigma},
      {"n_runs", cfg.n_runs},
      {"master_seed", cfg.master_seed},
      {"log_offspring", cfg.log_offspring},
      {"grid", {{"strengths", cfg.grid_strengths}, {"runs", cfg.grid_runs}}},
      {"robustness", {{"perturbations", cfg.perturbations}, {"probes", probes}}},
  };
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return config_from_json(j, path.parent_path());
}

ad::ArchitectureSpec resolve_architecture(const ExperimentConfig& cfg) {
  if (!cfg.architecture.empty()) return net::architecture_by_id(cfg.architecture);
  if (cfg.domain == "parity") return net::build_parity_net();
  if (cfg.domain == "maze") return net::build_maze_net();
  return net::build_toy_net();
}

std::unique_ptr<evolution::Domain> make_domain(const ExperimentConfig& cfg) {
  if (cfg.domain == "parity") return std::make_unique<domains::ParityDomain>(resolve_architecture(cfg), cfg.parity_fitness);
  if (cfg.domain == "maze") {
    return std::make_unique<domains::MazeDomain>(domains::load_maze(cfg.map, cfg.maze), resolve_architecture(cfg),
                                                 cfg.maze);
  }
  if (is_toy(cfg.domain)) {
    if (!cfg.architecture.empty() && cfg.architecture != "toy") {
      throw ConfigError("toy tasks use the toy architecture");
    }
    return std::make_unique<domains::ToyDomain>(domains::parse_toy_kind(cfg.domain.substr(4)));
  }
  throw ConfigError("unknown domain '" + cfg.domain + "'");
}

}  // namespace safemut::harness
