#ifndef AIF_EPISODE_LOG_H_
#define AIF_EPISODE_LOG_H_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "aif/belief.h"
#include "aif/types.h"
#include "aif/world.h"

namespace aif {

// Planner diagnostics kept in the episode log.
struct PlanLog {
  double g_min = 0.0;
  double g_mean = 0.0;
  std::vector<double> p_vis;
  std::array<int, 4> maneuver_counts{};  // nominal, surge, reverse, freeze
};

// One environment transition: the action applied at time t - dt and the
// resulting state, observation and status at time t.
struct StepRecord {
  int step = 0;
  double t = 0.0;
  KinematicState ego;
  std::optional<KinematicState> ped;  // absent when no pedestrian exists
  Observation obs;
  Vec2 action = Vec2::Zero();
  // Belief the action was chosen under (agents without a belief leave it
  // empty).
  std::optional<BeliefSummary> belief;
  std::optional<PlanLog> plan;
  EpisodeStatus status = EpisodeStatus::kRunning;
};

struct EpisodeRecord {
  std::string agent;
  PedestrianMode mode = PedestrianMode::kSuddenAppearance;
  std::uint64_t seed = 0;
  std::vector<StepRecord> steps;

  EpisodeStatus outcome() const {
    return steps.empty() ? EpisodeStatus::kRunning : steps.back().status;
  }
  double duration() const { return steps.empty() ? 0.0 : steps.back().t; }
};

// JSON-lines episode log, one object per step.
std::string StepToJson(const StepRecord& step);
StepRecord StepFromJson(const std::string& line);

void WriteEpisodeLog(std::ostream& out, const EpisodeRecord& record);
// Reads the steps of one episode; metadata fields stay default.
EpisodeRecord ReadEpisodeLog(std::istream& in);

}  // namespace aif

#endif  // AIF_EPISODE_LOG_H_
