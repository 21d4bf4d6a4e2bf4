#include "aif/baselines.h"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace aif {

PlannerConfig ReactivePlannerConfig(PlannerConfig base) {
  base.rho_h = 0.0;
  base.preference.w_eps = 0.0;
  return base;
}

Belief ReactiveBelief(const std::optional<Vec2>& observed_position,
                      const Vec2& velocity) {
  Particle p;
  p.weight = 1.0;
  p.exists = observed_position.has_value();
  if (p.exists) {
    p.kinematics.mean << observed_position->x(), observed_position->y(),
        velocity.x(), velocity.y();
    p.kinematics.covariance.setZero();
    p.anchor = p.kinematics;
  }
  // constant velocity: the activation gap is never reached
  p.hypothesis.d_act = -std::numeric_limits<double>::infinity();
  p.hypothesis.a_cap = 0.0;
  Belief b;
  b.particles.push_back(p);
  return b;
}

ReactiveAgent::ReactiveAgent(const PlannerConfig& planner,
                             const WorldModel& world)
    : world_(world), planner_(ReactivePlannerConfig(planner), world) {
  Reset(0);
}

void ReactiveAgent::Reset(std::uint64_t seed) {
  plan_rng_ = RandomStream(seed, StreamId::kPlanner);
  planner_.Reset();
  last_seen_.reset();
  belief_ = ReactiveBelief(std::nullopt, Vec2::Zero());
  has_plan_ = false;
}

Vec2 ReactiveAgent::Act(const Observation& obs, const KinematicState& ego) {
  std::optional<Vec2> seen;
  if (obs.ped_visible) seen = obs.ped_position;
  Vec2 velocity = Vec2::Zero();
  if (seen && last_seen_) velocity = (*seen - *last_seen_) / world_.dt;
  last_seen_ = seen;
  belief_ = ReactiveBelief(seen, velocity);
  last_plan_ = planner_.Plan(belief_, ego, plan_rng_);
  has_plan_ = true;
  return last_plan_.action;
}

void RuleConfig::Validate() const {
  if (!(caution_zone_start < caution_zone_end)) {
    throw std::invalid_argument("rule caution zone start must be < end");
  }
  if (!(v_caution > 0.0)) throw std::invalid_argument("rule v_caution must be > 0");
  if (!(speed_gain > 0.0)) throw std::invalid_argument("rule speed_gain must be > 0");
}

std::optional<double> RuleLongitudinalCommand(const KinematicState& ego,
                                              const RuleConfig& rule,
                                              const ActionBounds& bounds) {
  const double x = ego.position.x();
  if (x < rule.caution_zone_start || x > rule.caution_zone_end) {
    return std::nullopt;
  }
  const double cmd = rule.speed_gain * (rule.v_caution - ego.velocity.x());
  return std::clamp(cmd, bounds.min.x(), bounds.max.x());
}

RuleBasedAgent::RuleBasedAgent(const RuleConfig& rule,
                               const PlannerConfig& planner,
                               const WorldModel& world)
    : rule_(rule), world_(world), inner_(planner, world) {
  rule_.Validate();
}

Vec2 RuleBasedAgent::Act(const Observation& obs, const KinematicState& ego) {
  // the inner planner runs every step so its warm start stays current
  Vec2 action = inner_.Act(obs, ego);
  if (auto cmd = RuleLongitudinalCommand(ego, rule_, world_.action_bounds)) {
    action.x() = *cmd;
  }
  return action;
}

}  // namespace aif
