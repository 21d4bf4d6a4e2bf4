#include <algorithm>
#include <cmath>

#include "aif/world.h"

namespace aif {

bool IsVisible(const Vec2& ego, const Vec2& target, const Occluder& occluder) {
  const Vec2 lo = occluder.Min();
  const Vec2 hi = occluder.Max();
  // cheap exact exits: both endpoints beyond the same edge, or target inside
  for (int axis = 0; axis < 2; ++axis) {
    if ((ego[axis] < lo[axis] && target[axis] < lo[axis]) ||
        (ego[axis] > hi[axis] && target[axis] > hi[axis])) {
      return true;
    }
  }
  if (occluder.Contains(target)) return false;

  const Vec2 d = target - ego;

  // Parameter interval of the segment inside the closed rectangle.
  double t_enter = 0.0;
  double t_exit = 1.0;
  for (int axis = 0; axis < 2; ++axis) {
    if (d[axis] == 0.0) {
      if (ego[axis] < lo[axis] || ego[axis] > hi[axis]) return true;
      continue;
    }
    double t1 = (lo[axis] - ego[axis]) / d[axis];
    double t2 = (hi[axis] - ego[axis]) / d[axis];
    if (t1 > t2) std::swap(t1, t2);
    t_enter = std::max(t_enter, t1);
    t_exit = std::min(t_exit, t2);
    if (t_enter > t_exit) return true;
  }
  // Touching only at the ego endpoint does not block the view.
  return !(t_exit > 0.0);
}

Vec2 EgoHeading(const Vec2& velocity) {
  const double speed = velocity.norm();
  if (speed < 1e-9) return Vec2::UnitX();
  return velocity / speed;
}

double FootprintDistance(const Vec2& ego_position, const Vec2& heading_dir,
                         const Vec2& point, const CollisionGeometry& geometry) {
  const Vec2 rel = point - ego_position;
  const double along = heading_dir.x() * rel.x() + heading_dir.y() * rel.y();
  const double across = -heading_dir.y() * rel.x() + heading_dir.x() * rel.y();
  const double dx = std::max(std::abs(along) - 0.5 * geometry.ego_length, 0.0);
  const double dy = std::max(std::abs(across) - 0.5 * geometry.ego_width, 0.0);
  return std::sqrt(dx * dx + dy * dy);
}

bool CheckCollision(const KinematicState& ego, const KinematicState& ped,
                    const CollisionGeometry& geometry) {
  return FootprintDistance(ego.position, EgoHeading(ego.velocity),
                           ped.position, geometry) < geometry.radius;
}

KinematicState StepEgo(const KinematicState& state, const Vec2& action,
                       double dt, const ActionBounds& bounds) {
  const Vec2 a = bounds.Clamp(action);
  KinematicState next;
  next.velocity = state.velocity + a * dt;
  next.velocity.x() = std::max(next.velocity.x(), 0.0);
  next.position = state.position + next.velocity * dt;
  next.acceleration = (next.velocity - state.velocity) / dt;
  return next;
}

}  // namespace aif
