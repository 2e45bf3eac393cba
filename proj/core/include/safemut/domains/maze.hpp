#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "safemut/evolution/domain.hpp"
#include "safemut/net/architectures.hpp"

namespace safemut::domains {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct Segment {
  Vec2 a;
  Vec2 b;
};

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;  // radians, counter-clockwise from +x
};

/// Simulation and rasterization constants. Every field is exposed through
/// the experiment config.
struct MazeSettings {
  std::size_t episode_len = 400;
  double cell_size = 2.0;
  double robot_radius = 6.0;
  /// Rangefinder reach; 0 means half the map width.
  double range_max = 0.0;
  double v_scale = 1.0;
  double v_max = 3.0;
  double turn_scale = 0.1;
  double turn_max = 0.1;
  std::size_t archive_cap = 1000;
  /// End the episode once the robot is inside the goal circle.
  bool stop_at_goal = true;
};

struct GridCell {
  std::size_t col = 0;
  std::size_t row = 0;
  bool operator==(const GridCell&) const = default;
};

/// Rasterized free space. Row 0 is the lowest y.
struct OccupancyGrid {
  std::size_t cols = 0;
  std::size_t rows = 0;
  double cell_size = 1.0;
  Vec2 origin;
  std::vector<std::uint8_t> blocked;

  bool is_blocked(GridCell c) const { return blocked[c.row * cols + c.col] != 0; }
  GridCell cell_of(double x, double y) const;
  Vec2 center(GridCell c) const;
};

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

/// Shortest 8-connected path length (in cells, diagonal sqrt 2) from every
/// cell to the nearest goal cell. Blocked cells and cells cut off from the
/// goal hold kUnreachable. Diagonal moves may not cut a blocked corner.
struct DistanceField {
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::vector<double> distance;

  double at(GridCell c) const { return distance[c.row * cols + c.col]; }
  double max_finite() const;
};

DistanceField distance_field(const OccupancyGrid& grid, std::span<const GridCell> goals);

struct MazeWorld {
  std::vector<Segment> walls;
  Pose start;
  Vec2 goal;
  double goal_radius = 5.0;
  Vec2 min;
  Vec2 max;
  OccupancyGrid grid;
  DistanceField field;
  double range_max = 100.0;
};

/// Plain text, one directive per line, '#' starts a comment:
///   x1 y1 x2 y2          wall segment
///   start x y heading    heading in degrees
///   goal x y radius
/// Builds the grid and the distance field. Throws ConfigError on malformed
/// input or when the start cannot reach the goal.
MazeWorld parse_maze(std::istream& in, const MazeSettings& settings = {});
MazeWorld load_maze(const std::filesystem::path& path, const MazeSettings& settings = {});

/// Goal field over the world grid; cells whose centers lie within the goal
/// radius (plus half a cell diagonal) all count as the goal.
DistanceField astar_distance_field(const MazeWorld& world);

struct RobotState {
  Pose pose;
  double velocity = 0.0;
  double turn_rate = 0.0;
};

RobotState initial_state(const MazeWorld& world);

/// Egocentric rangefinder angles, degrees.
inline constexpr std::array<double, 6> kRangefinderAngles = {-90.0, -45.0, 0.0, 45.0, 90.0, 180.0};

/// 6 normalized rangefinder distances (1 = nothing within range) followed by
/// 4 goal-bearing slices (front, left, back, right), exactly one of which is 1.
std::array<double, net::kMazeSensorCount> maze_sense(const MazeWorld& world, const RobotState& state);

/// Effectors in (0, 1) map to velocity and turn-rate changes around the 0.5
/// midpoint; a move that would touch a wall is cancelled and stops the robot.
RobotState maze_step(const MazeWorld& world, const MazeSettings& settings, const RobotState& state,
                     std::array<double, 2> action);

bool collides(const MazeWorld& world, double radius, double x, double y);

struct TrajectoryPoint {
  std::size_t step = 0;
  Pose pose;
};

/// Rolls out one episode. fitness = -field(final cell); solved when the
/// final position is inside the goal circle. aux = {x, y, heading} of the
/// final pose. The controller input is the current sensor frame followed
/// by the previous one (the first step repeats the current frame).
evolution::EvalRecord maze_eval(const MazeWorld& world, const ad::ArchitectureSpec& arch,
                                const ad::ParamVector& params, const MazeSettings& settings,
                                std::vector<TrajectoryPoint>* trajectory = nullptr,
                                const Pose* start = nullptr);

/// Pools the experiences of several episodes from different start
/// headings (evenly spread over the circle), capped at settings.archive_cap.
mutation::ExperienceArchive maze_multi_start_archive(const MazeWorld& world,
                                                     const ad::ArchitectureSpec& arch,
                                                     const ad::ParamVector& params,
                                                     const MazeSettings& settings,
                                                     std::size_t episodes);

class MazeDomain final : public evolution::Domain {
 public:
  MazeDomain(MazeWorld world, ad::ArchitectureSpec arch, MazeSettings settings = {});

  std::string name() const override { return "maze"; }
  const ad::ArchitectureSpec& architecture() const override { return arch_; }
  evolution::EvalRecord evaluate(const ad::ParamVector& params) const override;
  /// (fitness + max field) / max field.
  double normalized_fitness(double fitness) const override;

  const MazeWorld& world() const { return world_; }
  const MazeSettings& settings() const { return settings_; }

 private:
  MazeWorld world_;
  ad::ArchitectureSpec arch_;
  MazeSettings settings_;
};

}  // namespace safemut::domains
