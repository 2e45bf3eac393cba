// Command line front end: campaigns, grid search, robustness probes,
// rank statistics and maze trajectory replay.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "safemut/domains/maze.hpp"
#include "safemut/errors.hpp"
#include "safemut/harness/campaign.hpp"
#include "safemut/harness/config.hpp"
#include "safemut/harness/robustness.hpp"
#include "safemut/harness/stats.hpp"
#include "safemut/net/architectures.hpp"
#include "safemut/net/genome.hpp"

namespace fs = std::filesystem;
using namespace safemut;

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

// Final best fitness per run from a curves.csv, or the first column of any
// other numeric CSV.
std::vector<double> read_sample(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) header.push_back(cell);
  }
  auto column = [&](const std::string& name) -> long {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<long>(i);
    }
    return -1;
  };
  const long run_col = column("run_id");
  const long fit_col = column("best_fitness");
  std::map<long, double> last;
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (run_col >= 0 && fit_col >= 0) {
      last[std::stol(cells.at(run_col))] = std::stod(cells.at(fit_col));
    } else {
      values.push_back(std::stod(cells.at(0)));
    }
  }
  if (run_col >= 0 && fit_col >= 0) {
    for (const auto& [run, v] : last) values.push_back(v);
  }
  return values;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Safe-mutation neuroevolution experiments"};
  app.require_subcommand(1);

  fs::path config_path;
  fs::path output;
  long runs_override = -1;
  long long seed_override = -1;

  auto* run = app.add_subcommand("run", "Run a multi-run campaign");
  run->add_option("config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--output", output, "Output directory (default: config output)");
  run->add_option("--runs", runs_override, "Override n_runs");
  run->add_option("--seed", seed_override, "Override master_seed");

  auto* grid = app.add_subcommand("gridsearch", "Sweep mutation strengths");
  grid->add_option("config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  grid->add_option("-o,--output", output, "Output directory (default: config output)");

  fs::path solutions_dir;
  long perturbations = -1;
  auto* robust = app.add_subcommand("robustness", "Perturb evolved solutions with probe mutations");
  robust->add_option("config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  robust->add_option("solutions", solutions_dir, "Directory of .genome files")->required()->check(CLI::ExistingDirectory);
  robust->add_option("-o,--output", output, "Output directory (default: config output)");
  robust->add_option("-n,--perturbations", perturbations, "Perturbations per solution and probe");

  fs::path csv_a;
  fs::path csv_b;
  auto* stats = app.add_subcommand("stats", "Mann-Whitney U test on two result files");
  stats->add_option("a", csv_a, "curves.csv or single-column CSV")->required()->check(CLI::ExistingFile);
  stats->add_option("b", csv_b, "curves.csv or single-column CSV")->required()->check(CLI::ExistingFile);

  fs::path genome_path;
  fs::path map_path;
  fs::path trajectory_path;
  std::size_t episode_len = domains::MazeSettings{}.episode_len;
  auto* replay = app.add_subcommand("replay", "Roll out a maze genome and dump its trajectory");
  replay->add_option("genome", genome_path, "Genome file")->required()->check(CLI::ExistingFile);
  replay->add_option("map", map_path, "Maze map file")->required()->check(CLI::ExistingFile);
  replay->add_option("-o,--output", trajectory_path, "Trajectory CSV (default: stdout)");
  replay->add_option("--episode-len", episode_len, "Episode length in steps");

  std::vector<fs::path> check_paths;
  auto* check = app.add_subcommand("check", "Validate configs and print them with defaults filled in");
  check->add_option("configs", check_paths, "Experiment configs (JSON)")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed()) {
      for (const auto& p : check_paths) {
        const auto cfg = harness::load_config(p);
        harness::make_domain(cfg);
        std::cout << harness::to_json(cfg).dump(2) << '\n';
      }
      return 0;
    }
    if (run->parsed() || grid->parsed() || robust->parsed()) {
      auto cfg = harness::load_config(config_path);
      if (runs_override > 0) cfg.n_runs = static_cast<std::size_t>(runs_override);
      if (seed_override >= 0) cfg.master_seed = static_cast<std::uint64_t>(seed_override);
      if (perturbations > 0) cfg.perturbations = static_cast<std::size_t>(perturbations);
      const fs::path out_dir = output.empty() ? cfg.output : output;
      auto domain = harness::make_domain(cfg);

      if (run->parsed()) {
        const auto result = harness::run_campaign(cfg, *domain, out_dir);
        std::cout << cfg.name << ": " << result.solved_count() << "/" << result.runs.size() << " runs solved; "
                  << "results in " << out_dir.string() << "\n";
        for (const auto& r : result.runs) {
          if (r.error) std::cerr << "run " << r.run_id << " failed: " << *r.error << "\n";
        }
      } else if (grid->parsed()) {
        const auto result = harness::grid_search(cfg, *domain);
        fs::create_directories(out_dir);
        auto out = open_out(out_dir / "gridsearch.csv");
        harness::write_grid_csv(out, result);
        harness::write_grid_csv(std::cout, result);
        std::cout << "best strength: " << result.best_strength << "\n";
      } else {
        if (cfg.probes.empty()) throw ConfigError("config lists no robustness probes");
        const auto solutions = harness::load_solutions(solutions_dir);
        if (solutions.empty()) throw ConfigError("no .genome files in " + solutions_dir.string());
        const auto result =
            harness::robustness_analysis(*domain, solutions, cfg.probes, cfg.perturbations, cfg.master_seed);
        auto rows = open_out(out_dir / "robustness.csv");
        harness::write_robustness_csv(rows, result);
        auto table = open_out(out_dir / "robustness_table.csv");
        harness::write_robustness_table(table, result);
        harness::write_robustness_table(std::cout, result);
      }
    } else if (stats->parsed()) {
      const auto a = read_sample(csv_a);
      const auto b = read_sample(csv_b);
      const auto r = harness::mann_whitney_u(a, b);
      std::printf("n_a=%zu n_b=%zu U_a=%g U_b=%g z=%.4f p=%.6g%s\n", a.size(), b.size(), r.u_a, r.u_b, r.z, r.p,
                  r.degenerate ? " (degenerate: all values identical)" : "");
    } else if (replay->parsed()) {
      domains::MazeSettings settings;
      settings.episode_len = episode_len;
      const auto world = domains::load_maze(map_path, settings);
      const auto genome = net::load_genome(genome_path);
      const auto arch = net::architecture_by_id(genome.arch_id);
      std::vector<domains::TrajectoryPoint> trajectory;
      const auto record = domains::maze_eval(world, arch, genome.params, settings, &trajectory);
      std::ofstream file;
      if (!trajectory_path.empty()) file = open_out(trajectory_path);
      std::ostream& out = trajectory_path.empty() ? std::cout : file;
      out << "step,x,y,heading\n";
      out.precision(17);
      for (const auto& p : trajectory) {
        out << p.step << ',' << p.pose.x << ',' << p.pose.y << ',' << p.pose.heading << '\n';
      }
      std::cerr << "fitness " << record.fitness << (record.solved ? " (solved)" : "") << "\n";
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
