#ifndef AIF_TYPES_H_
#define AIF_TYPES_H_

#include <Eigen/Core>

namespace aif {

using Vec2 = Eigen::Vector2d;

// Planar kinematic state. x is longitudinal (along the lane), y is lateral.
struct KinematicState {
  Vec2 position = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();
  Vec2 acceleration = Vec2::Zero();

  bool IsFinite() const {
    return position.allFinite() && velocity.allFinite() &&
           acceleration.allFinite();
  }
};

// Axis-aligned static occluding object (e.g. a parked truck).
struct Occluder {
  Vec2 center{5.0, -4.0};
  double length = 10.0;  // extent along x
  double width = 4.0;    // extent along y

  Vec2 Min() const { return center - Vec2(0.5 * length, 0.5 * width); }
  Vec2 Max() const { return center + Vec2(0.5 * length, 0.5 * width); }

  // Closed-set containment.
  bool Contains(const Vec2& p) const {
    const Vec2 lo = Min();
    const Vec2 hi = Max();
    return p.x() >= lo.x() && p.x() <= hi.x() && p.y() >= lo.y() &&
           p.y() <= hi.y();
  }

  // Lateral coordinate of the road-side edge; pedestrian lateral offsets are
  // measured from here.
  double CurbY() const { return center.y() + 0.5 * width; }

  Vec2 Clip(const Vec2& p) const { return p.cwiseMax(Min()).cwiseMin(Max()); }
};

// Per-axis acceleration limits for the ego vehicle.
struct ActionBounds {
  Vec2 min{-6.0, -3.0};
  Vec2 max{4.0, 3.0};

  Vec2 Clamp(const Vec2& a) const { return a.cwiseMax(min).cwiseMin(max); }
  bool Valid() const { return (min.array() < max.array()).all(); }
};

// Collision geometry shared by the simulator and the planner's rollouts.
// A collision is registered when the pedestrian center comes closer than
// `radius` to the ego footprint (a length x width rectangle aligned with the
// ego heading). A zero-sized footprint reduces this to a center distance test.
struct CollisionGeometry {
  double radius = 1.0;
  double ego_length = 4.5;
  double ego_width = 2.0;
};

}  // namespace aif

#endif  // AIF_TYPES_H_
