#ifndef AIF_AGENT_H_
#define AIF_AGENT_H_

#include <cstdint>
#include <optional>
#include <string_view>

#include "aif/belief.h"
#include "aif/planner.h"
#include "aif/rng.h"
#include "aif/world.h"

namespace aif {

// Closed-loop controller. Reset once per episode, then Act once per step
// with the newest observation and the ego state it was taken from.
class Agent {
 public:
  virtual ~Agent() = default;

  virtual std::string_view name() const = 0;
  virtual void Reset(std::uint64_t seed) = 0;
  virtual Vec2 Act(const Observation& obs, const KinematicState& ego) = 0;

  // Summary of the agent's belief after the last Act, if it keeps one.
  virtual std::optional<BeliefSummary> belief_summary() const {
    return std::nullopt;
  }
  // Diagnostics of the last planning call, if any.
  virtual const PlanDiagnostics* last_diagnostics() const { return nullptr; }
};

struct AgentConfig {
  BeliefConfig belief;
  PlannerConfig planner;
};

// Belief tracking with the particle filter plus EFE planning.
class ActiveInferenceAgent : public Agent {
 public:
  ActiveInferenceAgent(const AgentConfig& config, const WorldModel& world);

  std::string_view name() const override { return "ours"; }
  void Reset(std::uint64_t seed) override;
  Vec2 Act(const Observation& obs, const KinematicState& ego) override;
  std::optional<BeliefSummary> belief_summary() const override {
    return Summarize(belief_);
  }
  const PlanDiagnostics* last_diagnostics() const override {
    return has_plan_ ? &last_plan_.diagnostics : nullptr;
  }

  const Belief& belief() const { return belief_; }
  const AgentConfig& config() const { return config_; }

 private:
  AgentConfig config_;
  WorldModel world_;
  Planner planner_;
  Belief belief_;
  RandomStream update_rng_{0};
  RandomStream plan_rng_{0};
  PlanResult last_plan_;
  bool has_plan_ = false;
};

}  // namespace aif

#endif  // AIF_AGENT_H_
