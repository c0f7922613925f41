#pragma once

#include <span>
#include <utility>
#include <vector>

#include "textswarm/geometry.hpp"
#include "textswarm/rng.hpp"
#include "textswarm/vocabulary.hpp"

namespace textswarm {

// Closed arena centered at the origin, spanning [-width/2, width/2] x [-height/2, height/2].
struct Arena {
  double width = 25.0;
  double height = 25.0;
  std::vector<Rect> obstacles;

  Rect bounds() const { return {-width / 2, -height / 2, width / 2, height / 2}; }
  bool contains(Vec2 p) const;
  // Inside the arena and outside every obstacle interior.
  bool is_free(Vec2 p) const;
  // Throws ContractError when dimensions or obstacles are invalid.
  void validate() const;
};

// Large static obstacles laid out like booths and a central pillar block of a venue hall.
std::vector<Rect> venue_obstacles(double width, double height);

struct Pose {
  Vec2 position;
  double heading = 0.0;  // radians
};

struct MotionParams {
  double speed = 0.0;      // m/s, constant for the whole run
  double turn_rate = 0.0;  // turn events per second (exponential clock)
};

struct StepResult {
  Pose pose;
  bool turned = false;
  int reflections = 0;
};

// One tick of ballistic random-walk motion: straight travel with specular
// reflection at walls and obstacle edges (at most four bounces, then the agent
// stops at the contact point), followed by a heading resample with probability
// 1 - exp(-turn_rate * dt).
StepResult ballistic_step(const Pose& pose, const MotionParams& motion, double dt,
                          const Arena& arena, Rng& rng);

// True iff the open segment (p, q) meets the interior of some obstacle.
bool segment_blocked(Vec2 p, Vec2 q, std::span<const Rect> obstacles);

struct PersonState {
  int person_id = 0;
  Pose pose;
  MotionParams motion;
  PersonAttributes attributes;
};

struct RobotState {
  int robot_id = 0;
  Pose pose;
  MotionParams motion;
  double fov_half_angle = 0.0;
  double sensing_range = 0.0;
  double comm_range = 0.0;
};

// Ids of people within range, inside the field of view, and not occluded; in
// the order of `people`. All boundaries are inclusive.
std::vector<int> visible_people(const RobotState& robot, std::span<const PersonState> people,
                                const Arena& arena);

// Unordered robot pairs within min(comm_range) of each other, lower id first, sorted.
std::vector<std::pair<int, int>> comm_pairs(std::span<const RobotState> robots);

// Uniform point in free space (rejection sampling).
Vec2 sample_free_point(const Arena& arena, Rng& rng);

// All agents plus their private motion streams.
struct World {
  Arena arena;
  std::vector<RobotState> robots;
  std::vector<PersonState> people;
  std::vector<Rng> robot_motion;
  std::vector<Rng> person_motion;

  void advance(double dt);
};

}  // namespace textswarm
