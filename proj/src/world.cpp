#include "textswarm/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "textswarm/errors.hpp"

namespace textswarm {

bool Arena::contains(Vec2 p) const {
  const Rect b = bounds();
  return p.x >= b.min_x && p.x <= b.max_x && p.y >= b.min_y && p.y <= b.max_y;
}

bool Arena::is_free(Vec2 p) const {
  if (!contains(p)) return false;
  return std::none_of(obstacles.begin(), obstacles.end(),
                      [&](const Rect& r) { return r.interior_contains(p); });
}

void Arena::validate() const {
  if (!(width > 0.0) || !(height > 0.0)) throw ContractError("arena dimensions must be positive");
  const Rect b = bounds();
  for (const Rect& r : obstacles) {
    if (!r.valid()) throw ContractError("obstacle has non-positive extent");
    if (!r.inside(b)) throw ContractError("obstacle extends past the arena bounds");
  }
}

std::vector<Rect> venue_obstacles(double width, double height) {
  // Fractions of the half extents: four booths near the corners and a central block.
  const double hx = width / 2;
  const double hy = height / 2;
  auto box = [&](double x0, double y0, double x1, double y1) {
    return Rect{x0 * hx, y0 * hy, x1 * hx, y1 * hy};
  };
  return {box(-0.72, 0.48, -0.24, 0.72), box(0.24, 0.48, 0.72, 0.72),
          box(-0.72, -0.72, -0.24, -0.48), box(0.24, -0.72, 0.72, -0.48),
          box(-0.12, -0.2, 0.12, 0.2)};
}

namespace {

constexpr int kMaxReflections = 4;
constexpr double kEntryTolerance = 1e-9;

// Earliest boundary contact along `dir` within [0, limit]. Simultaneous contacts
// (corners) flip both velocity components.
struct Contact {
  double t = 0.0;
  bool flip_x = false;
  bool flip_y = false;
  std::optional<double> snap_x;
  std::optional<double> snap_y;
};

void consider(std::optional<Contact>& best, double t, double limit, bool flip_x,
              std::optional<double> snap_x, bool flip_y, std::optional<double> snap_y) {
  t = std::max(t, 0.0);
  if (t > limit) return;
  if (!best || t < best->t) {
    best = Contact{t, flip_x, flip_y, snap_x, snap_y};
  } else if (t == best->t) {
    if (flip_x) {
      best->flip_x = true;
      best->snap_x = snap_x;
    }
    if (flip_y) {
      best->flip_y = true;
      best->snap_y = snap_y;
    }
  }
}

std::optional<Contact> first_contact(Vec2 p, Vec2 d, double limit, const Arena& arena) {
  std::optional<Contact> best;
  const Rect b = arena.bounds();
  if (d.x > 0) consider(best, (b.max_x - p.x) / d.x, limit, true, b.max_x, false, {});
  if (d.x < 0) consider(best, (b.min_x - p.x) / d.x, limit, true, b.min_x, false, {});
  if (d.y > 0) consider(best, (b.max_y - p.y) / d.y, limit, false, {}, true, b.max_y);
  if (d.y < 0) consider(best, (b.min_y - p.y) / d.y, limit, false, {}, true, b.min_y);

  constexpr double inf = std::numeric_limits<double>::infinity();
  for (const Rect& r : arena.obstacles) {
    // Slab test for entry into the open rectangle.
    double tx0 = -inf, tx1 = inf, ty0 = -inf, ty1 = inf;
    if (d.x == 0.0) {
      if (!(p.x > r.min_x && p.x < r.max_x)) continue;
    } else {
      tx0 = (r.min_x - p.x) / d.x;
      tx1 = (r.max_x - p.x) / d.x;
      if (tx0 > tx1) std::swap(tx0, tx1);
    }
    if (d.y == 0.0) {
      if (!(p.y > r.min_y && p.y < r.max_y)) continue;
    } else {
      ty0 = (r.min_y - p.y) / d.y;
      ty1 = (r.max_y - p.y) / d.y;
      if (ty0 > ty1) std::swap(ty0, ty1);
    }
    const double t_near = std::max(tx0, ty0);
    const double t_far = std::min(tx1, ty1);
    if (!(t_near < t_far) || !(t_far > 0.0) || t_near < -kEntryTolerance) continue;
    const bool fx = d.x != 0.0 && tx0 >= ty0;
    const bool fy = d.y != 0.0 && ty0 >= tx0;
    consider(best, t_near, limit, fx, fx ? std::optional(d.x > 0 ? r.min_x : r.max_x) : std::nullopt,
             fy, fy ? std::optional(d.y > 0 ? r.min_y : r.max_y) : std::nullopt);
  }
  return best;
}

}  // namespace

StepResult ballistic_step(const Pose& pose, const MotionParams& motion, double dt,
                          const Arena& arena, Rng& rng) {
  if (!(dt > 0.0)) throw ContractError("ballistic_step requires dt > 0");
  if (!arena.is_free(pose.position))
    throw ContractError("ballistic_step: pose outside the free arena space");

  StepResult out;
  Vec2 pos = pose.position;
  Vec2 dir{std::cos(pose.heading), std::sin(pose.heading)};
  double remaining = motion.speed * dt;

  while (remaining > 0.0) {
    const auto hit = first_contact(pos, dir, remaining, arena);
    if (!hit) {
      pos = pos + dir * remaining;
      break;
    }
    pos = pos + dir * hit->t;
    if (hit->snap_x) pos.x = *hit->snap_x;
    if (hit->snap_y) pos.y = *hit->snap_y;
    if (out.reflections == kMaxReflections) break;  // stop at the contact point
    remaining -= hit->t;
    if (hit->flip_x) dir.x = -dir.x;
    if (hit->flip_y) dir.y = -dir.y;
    ++out.reflections;
  }

  const Rect b = arena.bounds();
  pos.x = std::clamp(pos.x, b.min_x, b.max_x);
  pos.y = std::clamp(pos.y, b.min_y, b.max_y);
  out.pose.position = pos;
  out.pose.heading =
      out.reflections > 0 ? normalize_heading(std::atan2(dir.y, dir.x)) : pose.heading;

  const double p_turn = -std::expm1(-motion.turn_rate * dt);
  if (rng.uniform() < p_turn) {
    out.pose.heading = rng.uniform(0.0, kTwoPi);
    out.turned = true;
  }
  return out;
}

bool segment_blocked(Vec2 p, Vec2 q, std::span<const Rect> obstacles) {
  const Vec2 d = q - p;
  for (const Rect& r : obstacles) {
    // Liang-Barsky clip against the closed rectangle; an axis-parallel segment
    // must lie strictly between the two faces it runs along.
    double t0 = 0.0, t1 = 1.0;
    bool outside = false;
    auto clip = [&](double delta, double lo, double hi, double origin) {
      if (delta == 0.0) {
        if (!(origin > lo && origin < hi)) outside = true;
        return;
      }
      double a = (lo - origin) / delta;
      double b = (hi - origin) / delta;
      if (a > b) std::swap(a, b);
      t0 = std::max(t0, a);
      t1 = std::min(t1, b);
    };
    clip(d.x, r.min_x, r.max_x, p.x);
    clip(d.y, r.min_y, r.max_y, p.y);
    if (!outside && t0 < t1) return true;
  }
  return false;
}

std::vector<int> visible_people(const RobotState& robot, std::span<const PersonState> people,
                                const Arena& arena) {
  std::vector<int> out;
  for (const PersonState& person : people) {
    const Vec2 delta = person.pose.position - robot.pose.position;
    const double dist = norm(delta);
    if (dist > robot.sensing_range) continue;
    if (dist > 0.0) {
      const double offset = std::abs(wrap_angle(std::atan2(delta.y, delta.x) - robot.pose.heading));
      if (offset > robot.fov_half_angle) continue;
    }
    if (segment_blocked(robot.pose.position, person.pose.position, arena.obstacles)) continue;
    out.push_back(person.person_id);
  }
  return out;
}

std::vector<std::pair<int, int>> comm_pairs(std::span<const RobotState> robots) {
  std::vector<std::pair<int, int>> out;
  for (std::size_t i = 0; i < robots.size(); ++i) {
    for (std::size_t j = i + 1; j < robots.size(); ++j) {
      const double range = std::min(robots[i].comm_range, robots[j].comm_range);
      if (distance(robots[i].pose.position, robots[j].pose.position) <= range) {
        const int a = robots[i].robot_id;
        const int b = robots[j].robot_id;
        out.emplace_back(std::min(a, b), std::max(a, b));
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Vec2 sample_free_point(const Arena& arena, Rng& rng) {
  const Rect b = arena.bounds();
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const Vec2 p{rng.uniform(b.min_x, b.max_x), rng.uniform(b.min_y, b.max_y)};
    if (arena.is_free(p)) return p;
  }
  throw ContractError("arena has no free space to spawn agents");
}

void World::advance(double dt) {
  for (std::size_t i = 0; i < people.size(); ++i) {
    auto& p = people[i];
    p.pose = ballistic_step(p.pose, p.motion, dt, arena, person_motion[i]).pose;
  }
  for (std::size_t i = 0; i < robots.size(); ++i) {
    auto& r = robots[i];
    r.pose = ballistic_step(r.pose, r.motion, dt, arena, robot_motion[i]).pose;
  }
}

}  // namespace textswarm
