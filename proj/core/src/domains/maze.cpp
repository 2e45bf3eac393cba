#include "safemut/domains/maze.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <numbers>
#include <queue>
#include <sstream>
#include <string>

#include "safemut/ad/forward.hpp"
#include "safemut/errors.hpp"

namespace safemut::domains {

namespace {

constexpr double kPi = std::numbers::pi;

double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

double point_segment_distance(Vec2 p, const Segment& s) {
  const double dx = s.b.x - s.a.x;
  const double dy = s.b.y - s.a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((p.x - s.a.x) * dx + (p.y - s.a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double ex = p.x - (s.a.x + t * dx);
  const double ey = p.y - (s.a.y + t * dy);
  return std::sqrt(ex * ex + ey * ey);
}

/// Distance along the ray to the segment, or infinity.
double ray_hit(Vec2 origin, Vec2 dir, const Segment& s) {
  const Vec2 edge{s.b.x - s.a.x, s.b.y - s.a.y};
  const double denom = cross(dir, edge);
  if (std::abs(denom) < 1e-12) return kUnreachable;
  const Vec2 rel{s.a.x - origin.x, s.a.y - origin.y};
  const double t = cross(rel, edge) / denom;
  const double u = cross(rel, dir) / denom;
  if (t < 0.0 || u < 0.0 || u > 1.0) return kUnreachable;
  return t;
}

double wrap_angle(double a) {
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  return a - kPi;
}

OccupancyGrid rasterize(const MazeWorld& world, double cell_size) {
  OccupancyGrid grid;
  grid.cell_size = cell_size;
  grid.origin = world.min;
  grid.cols = static_cast<std::size_t>(std::ceil((world.max.x - world.min.x) / cell_size));
  grid.rows = static_cast<std::size_t>(std::ceil((world.max.y - world.min.y) / cell_size));
  grid.blocked.assign(grid.cols * grid.rows, 0);
  // A cell is blocked when a wall passes within just over half its diagonal,
  // so a thin wall always leaves an 8-connected barrier.
  const double reach = 0.75 * cell_size;
  for (std::size_t r = 0; r < grid.rows; ++r) {
    for (std::size_t c = 0; c < grid.cols; ++c) {
      const Vec2 p = grid.center({c, r});
      for (const auto& w : world.walls) {
        if (point_segment_distance(p, w) < reach) {
          grid.blocked[r * grid.cols + c] = 1;
          break;
        }
      }
    }
  }
  return grid;
}

}  // namespace

GridCell OccupancyGrid::cell_of(double x, double y) const {
  auto index = [&](double v, double o, std::size_t n) {
    const double i = std::floor((v - o) / cell_size);
    return static_cast<std::size_t>(std::clamp(i, 0.0, static_cast<double>(n - 1)));
  };
  return {index(x, origin.x, cols), index(y, origin.y, rows)};
}

Vec2 OccupancyGrid::center(GridCell c) const {
  return {origin.x + (static_cast<double>(c.col) + 0.5) * cell_size,
          origin.y + (static_cast<double>(c.row) + 0.5) * cell_size};
}

double DistanceField::max_finite() const {
  double m = 0.0;
  for (double d : distance) {
    if (std::isfinite(d)) m = std::max(m, d);
  }
  return m;
}

DistanceField distance_field(const OccupancyGrid& grid, std::span<const GridCell> goals) {
  DistanceField field;
  field.cols = grid.cols;
  field.rows = grid.rows;
  field.distance.assign(grid.cols * grid.rows, kUnreachable);

  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  for (const auto& g : goals) {
    if (g.col >= grid.cols || g.row >= grid.rows) throw ConfigError("goal cell outside the grid");
    if (grid.is_blocked(g)) continue;
    const std::size_t i = g.row * grid.cols + g.col;
    field.distance[i] = 0.0;
    open.emplace(0.0, i);
  }
  const double diagonal = std::numbers::sqrt2;
  while (!open.empty()) {
    const auto [d, i] = open.top();
    open.pop();
    if (d > field.distance[i]) continue;
    const auto col = static_cast<std::ptrdiff_t>(i % grid.cols);
    const auto row = static_cast<std::ptrdiff_t>(i / grid.cols);
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        if (dr == 0 && dc == 0) continue;
        const std::ptrdiff_t nc = col + dc;
        const std::ptrdiff_t nr = row + dr;
        if (nc < 0 || nr < 0 || nc >= static_cast<std::ptrdiff_t>(grid.cols) ||
            nr >= static_cast<std::ptrdiff_t>(grid.rows)) {
          continue;
        }
        auto free = [&](std::ptrdiff_t c, std::ptrdiff_t r) {
          return !grid.is_blocked({static_cast<std::size_t>(c), static_cast<std::size_t>(r)});
        };
        if (!free(nc, nr)) continue;
        if (dr != 0 && dc != 0 && (!free(col + dc, row) || !free(col, row + dr))) continue;
        const double nd = d + ((dr != 0 && dc != 0) ? diagonal : 1.0);
        const std::size_t j = static_cast<std::size_t>(nr) * grid.cols + static_cast<std::size_t>(nc);
        if (nd < field.distance[j]) {
          field.distance[j] = nd;
          open.emplace(nd, j);
        }
      }
    }
  }
  return field;
}

DistanceField astar_distance_field(const MazeWorld& world) {
  const auto& grid = world.grid;
  const double reach = world.goal_radius + 0.5 * std::numbers::sqrt2 * grid.cell_size;
  std::vector<GridCell> goals;
  for (std::size_t r = 0; r < grid.rows; ++r) {
    for (std::size_t c = 0; c < grid.cols; ++c) {
      const Vec2 p = grid.center({c, r});
      if (std::hypot(p.x - world.goal.x, p.y - world.goal.y) <= reach) goals.push_back({c, r});
    }
  }
  if (goals.empty()) goals.push_back(grid.cell_of(world.goal.x, world.goal.y));
  return distance_field(grid, goals);
}

MazeWorld parse_maze(std::istream& in, const MazeSettings& settings) {
  MazeWorld world;
  bool have_start = false;
  bool have_goal = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string first;
    if (!(fields >> first)) continue;
    const std::string where = " (line " + std::to_string(line_no) + ")";
    if (first == "start") {
      double deg = 0.0;
      if (!(fields >> world.start.x >> world.start.y >> deg)) throw ConfigError("malformed start" + where);
      world.start.heading = wrap_angle(deg * kPi / 180.0);
      have_start = true;
    } else if (first == "goal") {
      if (!(fields >> world.goal.x >> world.goal.y >> world.goal_radius)) throw ConfigError("malformed goal" + where);
      have_goal = true;
    } else {
      Segment s;
      std::istringstream seg(line);
      if (!(seg >> s.a.x >> s.a.y >> s.b.x >> s.b.y)) throw ConfigError("malformed wall" + where);
      world.walls.push_back(s);
    }
  }
  if (world.walls.empty() || !have_start || !have_goal) {
    throw ConfigError("maze needs walls, a start and a goal");
  }
  world.min = {kUnreachable, kUnreachable};
  world.max = {-kUnreachable, -kUnreachable};
  for (const auto& w : world.walls) {
    for (const Vec2& p : {w.a, w.b}) {
      world.min = {std::min(world.min.x, p.x), std::min(world.min.y, p.y)};
      world.max = {std::max(world.max.x, p.x), std::max(world.max.y, p.y)};
    }
  }
  world.range_max = settings.range_max > 0.0 ? settings.range_max : 0.5 * (world.max.x - world.min.x);
  if (settings.cell_size <= 0.0) throw ConfigError("cell size must be positive");
  world.grid = rasterize(world, settings.cell_size);
  world.field = astar_distance_field(world);

  if (collides(world, settings.robot_radius, world.start.x, world.start.y)) {
    throw ConfigError("robot start position overlaps a wall");
  }
  const GridCell start = world.grid.cell_of(world.start.x, world.start.y);
  if (!std::isfinite(world.field.at(start))) throw ConfigError("goal is unreachable from the start");
  return world;
}

MazeWorld load_maze(const std::filesystem::path& path, const MazeSettings& settings) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read map file " + path.string());
  return parse_maze(in, settings);
}

RobotState initial_state(const MazeWorld& world) { return {world.start, 0.0, 0.0}; }

bool collides(const MazeWorld& world, double radius, double x, double y) {
  const Vec2 p{x, y};
  for (const auto& w : world.walls) {
    if (point_segment_distance(p, w) < radius) return true;
  }
  return false;
}

std::array<double, net::kMazeSensorCount> maze_sense(const MazeWorld& world, const RobotState& state) {
  std::array<double, net::kMazeSensorCount> s{};
  const Vec2 origin{state.pose.x, state.pose.y};
  for (std::size_t i = 0; i < kRangefinderAngles.size(); ++i) {
    const double a = state.pose.heading + kRangefinderAngles[i] * kPi / 180.0;
    const Vec2 dir{std::cos(a), std::sin(a)};
    double nearest = world.range_max;
    for (const auto& w : world.walls) nearest = std::min(nearest, ray_hit(origin, dir, w));
    s[i] = nearest / world.range_max;
  }
  // Bearing to the goal relative to the heading, in [0, 2 pi).
  double bearing = std::atan2(world.goal.y - state.pose.y, world.goal.x - state.pose.x) - state.pose.heading;
  bearing = std::fmod(bearing + kPi / 4.0, 2.0 * kPi);
  if (bearing < 0.0) bearing += 2.0 * kPi;
  const auto slice = std::min<std::size_t>(3, static_cast<std::size_t>(bearing / (kPi / 2.0)));
  s[kRangefinderAngles.size() + slice] = 1.0;
  return s;
}

RobotState maze_step(const MazeWorld& world, const MazeSettings& settings, const RobotState& state,
                     std::array<double, 2> action) {
  RobotState next = state;
  next.velocity = std::clamp(state.velocity + (action[0] - 0.5) * settings.v_scale, -settings.v_max, settings.v_max);
  next.turn_rate =
      std::clamp(state.turn_rate + (action[1] - 0.5) * settings.turn_scale, -settings.turn_max, settings.turn_max);
  next.pose.heading = wrap_angle(state.pose.heading + next.turn_rate);
  const double nx = state.pose.x + next.velocity * std::cos(next.pose.heading);
  const double ny = state.pose.y + next.velocity * std::sin(next.pose.heading);
  if (collides(world, settings.robot_radius, nx, ny)) {
    next.velocity = 0.0;
  } else {
    next.pose.x = nx;
    next.pose.y = ny;
  }
  return next;
}

evolution::EvalRecord maze_eval(const MazeWorld& world, const ad::ArchitectureSpec& arch,
                                const ad::ParamVector& params, const MazeSettings& settings,
                                std::vector<TrajectoryPoint>* trajectory, const Pose* start) {
  if (arch.input_width != net::kMazeInputWidth || arch.output_width != net::kMazeOutputWidth) {
    throw ConfigError("maze controller must map " + std::to_string(net::kMazeInputWidth) + " inputs to " +
                      std::to_string(net::kMazeOutputWidth) + " outputs");
  }
  ad::StepRunner runner(arch, params);
  RobotState state = initial_state(world);
  if (start) state.pose = *start;

  constexpr std::size_t kIn = net::kMazeInputWidth;
  constexpr std::size_t kOut = net::kMazeOutputWidth;
  std::vector<double> xs;
  std::vector<double> ys;
  xs.reserve(settings.episode_len * kIn);
  ys.reserve(settings.episode_len * kOut);

  auto inside_goal = [&](const RobotState& s) {
    return std::hypot(s.pose.x - world.goal.x, s.pose.y - world.goal.y) <= world.goal_radius;
  };

  if (trajectory) trajectory->push_back({0, state.pose});
  auto previous = maze_sense(world, state);
  std::array<double, kIn> input{};
  std::size_t steps = 0;
  for (; steps < settings.episode_len; ++steps) {
    if (settings.stop_at_goal && inside_goal(state)) break;
    const auto current = maze_sense(world, state);
    std::copy(current.begin(), current.end(), input.begin());
    std::copy(previous.begin(), previous.end(), input.begin() + net::kMazeSensorCount);
    previous = current;
    const auto out = runner.step(input);
    xs.insert(xs.end(), input.begin(), input.end());
    ys.insert(ys.end(), out.begin(), out.end());
    state = maze_step(world, settings, state, {out[0], out[1]});
    if (trajectory) trajectory->push_back({steps + 1, state.pose});
  }

  evolution::EvalRecord record;
  const double d = world.field.at(world.grid.cell_of(state.pose.x, state.pose.y));
  record.fitness = std::isfinite(d) ? (d > 0.0 ? -d : 0.0) : -world.field.max_finite();
  record.solved = inside_goal(state);
  record.aux = {state.pose.x, state.pose.y, state.pose.heading};

  const std::size_t n = ys.size() / kOut;
  ad::Matrix x(n, kIn);
  ad::Matrix y(n, kOut);
  std::copy(xs.begin(), xs.end(), x.data());
  std::copy(ys.begin(), ys.end(), y.data());
  record.archive = mutation::subsample({ad::SequenceBatch({std::move(x)}), ad::SequenceBatch({std::move(y)})},
                                       settings.archive_cap);
  return record;
}

mutation::ExperienceArchive maze_multi_start_archive(const MazeWorld& world, const ad::ArchitectureSpec& arch,
                                                     const ad::ParamVector& params, const MazeSettings& settings,
                                                     std::size_t episodes) {
  if (episodes == 0) throw ConfigError("need at least one episode");
  MazeSettings uncapped = settings;
  uncapped.archive_cap = std::numeric_limits<std::size_t>::max();
  std::vector<ad::Matrix> xs;
  std::vector<ad::Matrix> ys;
  std::size_t rows = 0;
  for (std::size_t e = 0; e < episodes; ++e) {
    Pose start = world.start;
    start.heading = wrap_angle(start.heading + 2.0 * kPi * static_cast<double>(e) / static_cast<double>(episodes));
    auto record = maze_eval(world, arch, params, uncapped, nullptr, &start);
    rows += record.archive.size();
    xs.push_back(record.archive.inputs.step(0));
    ys.push_back(record.archive.outputs.step(0));
  }
  ad::Matrix x(rows, net::kMazeInputWidth);
  ad::Matrix y(rows, net::kMazeOutputWidth);
  std::size_t at = 0;
  for (std::size_t e = 0; e < episodes; ++e) {
    std::copy(xs[e].flat().begin(), xs[e].flat().end(), x.data() + at * net::kMazeInputWidth);
    std::copy(ys[e].flat().begin(), ys[e].flat().end(), y.data() + at * net::kMazeOutputWidth);
    at += xs[e].rows();
  }
  return mutation::subsample({ad::SequenceBatch({std::move(x)}), ad::SequenceBatch({std::move(y)})},
                             settings.archive_cap);
}

MazeDomain::MazeDomain(MazeWorld world, ad::ArchitectureSpec arch, MazeSettings settings)
    : world_(std::move(world)), arch_(std::move(arch)), settings_(settings) {
  ad::validate(arch_);
}

evolution::EvalRecord MazeDomain::evaluate(const ad::ParamVector& params) const {
  return maze_eval(world_, arch_, params, settings_);
}

double MazeDomain::normalized_fitness(double fitness) const {
  const double m = world_.field.max_finite();
  return m > 0.0 ? std::clamp((fitness + m) / m, 0.0, 1.0) : 1.0;
}

}  // namespace safemut::domains
