#ifndef AIF_BASELINES_H_
#define AIF_BASELINES_H_

#include <optional>

#include "aif/agent.h"
#include "aif/planner.h"
#include "aif/world.h"

namespace aif {

// Planner settings for a purely reactive agent: no injection and no
// information-seeking term.
PlannerConfig ReactivePlannerConfig(PlannerConfig base);

// Degenerate belief for the reactive planner: a single existing particle at
// the observed position moving at `velocity` with constant velocity, or a
// single non-existing particle when nothing is seen.
Belief ReactiveBelief(const std::optional<Vec2>& observed_position,
                      const Vec2& velocity);

// MPPI-CEM planner that only accounts for the currently visible pedestrian.
class ReactiveAgent : public Agent {
 public:
  ReactiveAgent(const PlannerConfig& planner, const WorldModel& world);

  std::string_view name() const override { return "reactive"; }
  void Reset(std::uint64_t seed) override;
  Vec2 Act(const Observation& obs, const KinematicState& ego) override;
  std::optional<BeliefSummary> belief_summary() const override {
    return Summarize(belief_);
  }
  const PlanDiagnostics* last_diagnostics() const override {
    return has_plan_ ? &last_plan_.diagnostics : nullptr;
  }

 private:
  WorldModel world_;
  Planner planner_;
  Belief belief_;
  RandomStream plan_rng_{0};
  std::optional<Vec2> last_seen_;
  PlanResult last_plan_;
  bool has_plan_ = false;
};

struct RuleConfig {
  double caution_zone_start = -15.0;  // ego x [m]
  double caution_zone_end = 10.0;     // ego x [m]
  double v_caution = 3.0;             // [m/s]
  double speed_gain = 2.0;            // proportional gain [1/s]

  void Validate() const;
};

// Longitudinal command of the caution-zone rule, or nullopt outside the zone.
std::optional<double> RuleLongitudinalCommand(const KinematicState& ego,
                                              const RuleConfig& rule,
                                              const ActionBounds& bounds);

// Slows to a fixed speed inside a band around the occluder, otherwise drives
// like the reactive agent. The lateral command always comes from the inner
// planner.
class RuleBasedAgent : public Agent {
 public:
  RuleBasedAgent(const RuleConfig& rule, const PlannerConfig& planner,
                 const WorldModel& world);

  std::string_view name() const override { return "rule"; }
  void Reset(std::uint64_t seed) override { inner_.Reset(seed); }
  Vec2 Act(const Observation& obs, const KinematicState& ego) override;
  std::optional<BeliefSummary> belief_summary() const override {
    return inner_.belief_summary();
  }
  const PlanDiagnostics* last_diagnostics() const override {
    return inner_.last_diagnostics();
  }

 private:
  RuleConfig rule_;
  WorldModel world_;
  ReactiveAgent inner_;
};

}  // namespace aif

#endif  // AIF_BASELINES_H_
