#include "aif/agent.h"

namespace aif {

ActiveInferenceAgent::ActiveInferenceAgent(const AgentConfig& config,
                                           const WorldModel& world)
    : config_(config), world_(world), planner_(config.planner, world) {
  config_.belief.Validate();
  Reset(0);
}

void ActiveInferenceAgent::Reset(std::uint64_t seed) {
  RandomStream init_rng(seed, StreamId::kBeliefInit);
  belief_ = InitBelief(config_.belief, world_.occluder, init_rng);
  update_rng_ = RandomStream(seed, StreamId::kBeliefUpdate);
  plan_rng_ = RandomStream(seed, StreamId::kPlanner);
  planner_.Reset();
  has_plan_ = false;
}

Vec2 ActiveInferenceAgent::Act(const Observation& obs,
                               const KinematicState& ego) {
  belief_ = UpdateBelief(belief_, obs, ego, world_, config_.belief, update_rng_);
  last_plan_ = planner_.Plan(belief_, ego, plan_rng_);
  has_plan_ = true;
  return last_plan_.action;
}

}  // namespace aif
