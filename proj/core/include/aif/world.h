#ifndef AIF_WORLD_H_
#define AIF_WORLD_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "aif/rng.h"
#include "aif/types.h"

namespace aif {

// ---------------------------------------------------------------------------
// Geometry

// Line-of-sight test. Returns false iff the segment from `ego` to `target`
// (ego endpoint excluded) touches the closed occluder rectangle, which also
// covers a target lying inside the rectangle.
bool IsVisible(const Vec2& ego, const Vec2& target, const Occluder& occluder);

// Distance from `point` to the ego footprint. The footprint is centered on
// `ego_position` and aligned with `heading_dir` (unit vector).
double FootprintDistance(const Vec2& ego_position, const Vec2& heading_dir,
                         const Vec2& point, const CollisionGeometry& geometry);

// Heading of the ego vehicle: direction of travel, or +x when at rest.
Vec2 EgoHeading(const Vec2& velocity);

bool CheckCollision(const KinematicState& ego, const KinematicState& ped,
                    const CollisionGeometry& geometry);

// Semi-implicit Euler step of the ego double integrator. The action is
// clamped to `bounds` and the longitudinal velocity never goes negative.
KinematicState StepEgo(const KinematicState& state, const Vec2& action,
                       double dt, const ActionBounds& bounds);

// ---------------------------------------------------------------------------
// Scenario

enum class PedestrianMode {
  kHesitant,
  kDeceptiveAccelerating,
  kTurningBack,
  kSuddenStop,
  kSuddenAppearance,
};

inline constexpr PedestrianMode kAllModes[] = {
    PedestrianMode::kHesitant, PedestrianMode::kDeceptiveAccelerating,
    PedestrianMode::kTurningBack, PedestrianMode::kSuddenStop,
    PedestrianMode::kSuddenAppearance};

std::string_view ModeName(PedestrianMode mode);
std::optional<PedestrianMode> ParseMode(std::string_view name);

struct HesitantParams {
  double hesitation_duration = 0.5;  // t_h [s]
  double movement_duration = 2.0;    // t_m [s]
};
struct DeceptiveParams {
  double slow_speed = 2.0;           // [m/s]
  double trigger_distance = 6.0;     // longitudinal gap that triggers the rush [m]
};
struct TurningBackParams {
  double trigger_distance = 6.0;     // longitudinal gap that triggers retreat [m]
  double turn_offset = 4.0;          // lateral intrusion before turning [m]
};
struct SuddenStopParams {
  double stop_offset = 2.0;          // lateral offset of the halt [m]
};
struct SuddenAppearanceParams {};

using ModeParams = std::variant<HesitantParams, DeceptiveParams,
                                TurningBackParams, SuddenStopParams,
                                SuddenAppearanceParams>;

// Latent pedestrian parameters for one episode.
struct ScenarioParams {
  PedestrianMode mode = PedestrianMode::kSuddenAppearance;
  Vec2 ped_initial_position{10.0, -4.0};
  double v_max = 6.0;
  double a_max = 6.0;
  double d_act = 12.0;  // activation gap to the ego [m]
  ModeParams specific = SuddenAppearanceParams{};
};

struct EnvConfig {
  double dt = 0.1;
  int max_steps = 150;
  KinematicState ego_init{Vec2(-25.0, 0.0), Vec2(10.0, 0.0), Vec2::Zero()};
  Occluder occluder;
  CollisionGeometry collision;
  double goal_x = 30.0;
  ActionBounds action_bounds;
  Vec2 obs_noise_std = Vec2::Zero();
  std::uint64_t seed = 0;
  // Lateral velocity during a Hesitant reverse interval, as a fraction of
  // v_max (applied with negative sign).
  double hesitant_reverse_fraction = 0.5;
  // Mean and standard deviation of the pedestrian start position prior.
  Vec2 ped_prior_mean{12.0, -4.0};
  Vec2 ped_prior_std{2.0 / 3.0, 2.0 / 3.0};
  // When false the episode has no pedestrian at all (z_p = 0).
  bool pedestrian_present = true;

  // Throws std::invalid_argument on an invalid configuration.
  void Validate() const;
};

// Draws every latent parameter for `mode`. The start position comes from the
// prior Gaussian clipped to the occluder footprint.
ScenarioParams SampleScenario(PedestrianMode mode, const EnvConfig& config,
                              RandomStream& rng);

// ---------------------------------------------------------------------------
// Pedestrian behaviour

// Per-episode automaton memory of the pedestrian.
struct PedestrianMemory {
  bool activated = false;
  bool triggered = false;  // Deceptive rush / TurningBack retreat started
  bool halted = false;     // SuddenStop reached its stop offset
  bool moving_phase = true;  // Hesitant: moving vs hesitating
  bool reversing = false;    // Hesitant: hesitation is a reverse interval
  double phase_time = 0.0;   // Hesitant: time spent in current phase [s]
};

struct PedestrianStep {
  KinematicState state;
  PedestrianMemory memory;
};

// Advances the pedestrian by one step given the (already advanced) ego.
PedestrianStep StepPedestrian(const KinematicState& ped,
                              const ScenarioParams& params,
                              const KinematicState& ego,
                              const PedestrianMemory& memory, double dt,
                              const EnvConfig& config, RandomStream& rng);

// ---------------------------------------------------------------------------
// Observation

struct Observation {
  bool ped_visible = false;
  std::optional<Vec2> ped_position;
  bool collision = false;
};

Observation Observe(const KinematicState& ego, const KinematicState& ped,
                    bool ped_present, const Occluder& occluder, bool collision,
                    const Vec2& noise_std, RandomStream& rng);

// The static part of the world that agents are allowed to know: timestep,
// occluder geometry, collision geometry and the ego's actuation limits.
struct WorldModel {
  double dt = 0.1;
  Occluder occluder;
  CollisionGeometry collision;
  ActionBounds action_bounds;

  static WorldModel FromConfig(const EnvConfig& config) {
    return WorldModel{config.dt, config.occluder, config.collision,
                      config.action_bounds};
  }
};

// ---------------------------------------------------------------------------
// Episode lifecycle

enum class EpisodeStatus { kRunning, kCollision, kGoalReached, kTimeout };

std::string_view StatusName(EpisodeStatus status);
std::optional<EpisodeStatus> ParseStatus(std::string_view name);

struct StepResult {
  Observation observation;
  EpisodeStatus status = EpisodeStatus::kRunning;
};

// Ground-truth simulator for a single episode. Single owner, not shared.
class Environment {
 public:
  // Samples the scenario for `mode` from the episode's scenario substream.
  Environment(const EnvConfig& config, PedestrianMode mode);
  Environment(const EnvConfig& config, const ScenarioParams& scenario);

  // Restores the initial state and returns the first observation.
  Observation Reset();

  // Throws std::logic_error when the episode has already terminated.
  StepResult Step(const Vec2& action);

  const EnvConfig& config() const { return config_; }
  const ScenarioParams& scenario() const { return scenario_; }
  const KinematicState& ego() const { return ego_; }
  const KinematicState& pedestrian() const { return ped_; }
  const PedestrianMemory& pedestrian_memory() const { return memory_; }
  bool pedestrian_present() const { return config_.pedestrian_present; }
  EpisodeStatus status() const { return status_; }
  int step_count() const { return step_; }
  double time() const { return step_ * config_.dt; }

 private:
  EnvConfig config_;
  ScenarioParams scenario_;
  KinematicState ego_;
  KinematicState ped_;
  PedestrianMemory memory_;
  RandomStream ped_rng_;
  RandomStream noise_rng_;
  EpisodeStatus status_ = EpisodeStatus::kRunning;
  int step_ = 0;
};

}  // namespace aif

#endif  // AIF_WORLD_H_
