#include "aif/world.h"

#include <array>
#include <stdexcept>
#include <utility>

namespace aif {
namespace {

constexpr std::array<std::pair<PedestrianMode, std::string_view>, 5>
    kModeNames{{
        {PedestrianMode::kHesitant, "hesitant"},
        {PedestrianMode::kDeceptiveAccelerating, "deceptive"},
        {PedestrianMode::kTurningBack, "turning_back"},
        {PedestrianMode::kSuddenStop, "sudden_stop"},
        {PedestrianMode::kSuddenAppearance, "sudden_appearance"},
    }};

constexpr std::array<std::pair<EpisodeStatus, std::string_view>, 4>
    kStatusNames{{
        {EpisodeStatus::kRunning, "running"},
        {EpisodeStatus::kCollision, "collision"},
        {EpisodeStatus::kGoalReached, "goal_reached"},
        {EpisodeStatus::kTimeout, "timeout"},
    }};

void Require(bool condition, const char* message) {
  if (!condition) throw std::invalid_argument(message);
}

}  // namespace

std::string_view ModeName(PedestrianMode mode) {
  for (const auto& [m, name] : kModeNames) {
    if (m == mode) return name;
  }
  return "unknown";
}

std::optional<PedestrianMode> ParseMode(std::string_view name) {
  for (const auto& [m, n] : kModeNames) {
    if (n == name) return m;
  }
  return std::nullopt;
}

std::string_view StatusName(EpisodeStatus status) {
  for (const auto& [s, name] : kStatusNames) {
    if (s == status) return name;
  }
  return "unknown";
}

std::optional<EpisodeStatus> ParseStatus(std::string_view name) {
  for (const auto& [s, n] : kStatusNames) {
    if (n == name) return s;
  }
  return std::nullopt;
}

void EnvConfig::Validate() const {
  Require(dt > 0.0, "env.dt must be positive");
  Require(max_steps > 0, "env.max_steps must be positive");
  Require(collision.radius > 0.0, "env.collision_radius must be positive");
  Require(collision.ego_length >= 0.0 && collision.ego_width >= 0.0,
          "env ego dimensions must be non-negative");
  Require(action_bounds.Valid(), "env.action_bounds: min must be < max");
  Require(occluder.length > 0.0 && occluder.width > 0.0,
          "env.occluder dimensions must be positive");
  Require((obs_noise_std.array() >= 0.0).all(),
          "env.obs_noise_std must be non-negative");
  Require((ped_prior_std.array() >= 0.0).all(),
          "env.ped_prior_std must be non-negative");
  Require(hesitant_reverse_fraction >= 0.0 && hesitant_reverse_fraction <= 1.0,
          "env.hesitant_reverse_fraction must lie in [0, 1]");
  Require(ego_init.IsFinite(), "env.ego_init must be finite");
}

ScenarioParams SampleScenario(PedestrianMode mode, const EnvConfig& config,
                              RandomStream& rng) {
  ScenarioParams p;
  p.mode = mode;
  p.v_max = rng.Uniform(4.0, 8.0);
  p.a_max = rng.Uniform(4.0, 8.0);
  const Vec2 raw(rng.Normal(config.ped_prior_mean.x(), config.ped_prior_std.x()),
                 rng.Normal(config.ped_prior_mean.y(), config.ped_prior_std.y()));
  p.ped_initial_position = config.occluder.Clip(raw);

  switch (mode) {
    case PedestrianMode::kHesitant: {
      p.d_act = rng.Uniform(15.0, 25.0);
      HesitantParams h;
      h.hesitation_duration = rng.Uniform(0.0, 1.0);
      h.movement_duration = rng.Uniform(1.5, 2.5);
      p.specific = h;
      break;
    }
    case PedestrianMode::kDeceptiveAccelerating: {
      p.d_act = rng.Uniform(15.0, 25.0);
      DeceptiveParams d;
      d.slow_speed = rng.Uniform(1.5, 4.0);
      d.trigger_distance = rng.Uniform(4.0, 8.0);
      p.specific = d;
      break;
    }
    case PedestrianMode::kTurningBack: {
      p.d_act = rng.Uniform(15.0, 25.0);
      TurningBackParams t;
      t.trigger_distance = rng.Uniform(4.0, 8.0);
      t.turn_offset = rng.Uniform(2.0, 6.0);
      p.specific = t;
      break;
    }
    case PedestrianMode::kSuddenStop: {
      p.d_act = rng.Uniform(15.0, 20.0);
      SuddenStopParams s;
      s.stop_offset = rng.Uniform(0.0, 4.0);
      p.specific = s;
      break;
    }
    case PedestrianMode::kSuddenAppearance:
      p.d_act = rng.Uniform(10.0, 15.0);
      p.specific = SuddenAppearanceParams{};
      break;
  }
  return p;
}

Observation Observe(const KinematicState& ego, const KinematicState& ped,
                    bool ped_present, const Occluder& occluder, bool collision,
                    const Vec2& noise_std, RandomStream& rng) {
  Observation obs;
  obs.collision = collision;
  obs.ped_visible =
      ped_present && IsVisible(ego.position, ped.position, occluder);
  if (obs.ped_visible) {
    obs.ped_position = Vec2(rng.Normal(ped.position.x(), noise_std.x()),
                            rng.Normal(ped.position.y(), noise_std.y()));
  }
  return obs;
}

Environment::Environment(const EnvConfig& config, PedestrianMode mode)
    : Environment(config, [&] {
        config.Validate();
        RandomStream rng(config.seed, StreamId::kScenario);
        return SampleScenario(mode, config, rng);
      }()) {}

Environment::Environment(const EnvConfig& config,
                         const ScenarioParams& scenario)
    : config_(config),
      scenario_(scenario),
      ped_rng_(config.seed, StreamId::kPedestrian),
      noise_rng_(config.seed, StreamId::kObservationNoise) {
  config_.Validate();
  Reset();
}

Observation Environment::Reset() {
  ego_ = config_.ego_init;
  ped_ = KinematicState{};
  ped_.position = scenario_.ped_initial_position;
  memory_ = PedestrianMemory{};
  ped_rng_ = RandomStream(config_.seed, StreamId::kPedestrian);
  noise_rng_ = RandomStream(config_.seed, StreamId::kObservationNoise);
  status_ = EpisodeStatus::kRunning;
  step_ = 0;
  const bool collision = config_.pedestrian_present &&
                         CheckCollision(ego_, ped_, config_.collision);
  return Observe(ego_, ped_, config_.pedestrian_present, config_.occluder,
                 collision, config_.obs_noise_std, noise_rng_);
}

StepResult Environment::Step(const Vec2& action) {
  if (status_ != EpisodeStatus::kRunning) {
    throw std::logic_error("Environment::Step called on a terminated episode");
  }
  ego_ = StepEgo(ego_, action, config_.dt, config_.action_bounds);
  if (config_.pedestrian_present) {
    PedestrianStep next = StepPedestrian(ped_, scenario_, ego_, memory_,
                                         config_.dt, config_, ped_rng_);
    ped_ = next.state;
    memory_ = next.memory;
  }
  ++step_;

  const bool collision = config_.pedestrian_present &&
                         CheckCollision(ego_, ped_, config_.collision);
  if (collision) {
    status_ = EpisodeStatus::kCollision;
  } else if (ego_.position.x() >= config_.goal_x) {
    status_ = EpisodeStatus::kGoalReached;
  } else if (step_ >= config_.max_steps) {
    status_ = EpisodeStatus::kTimeout;
  }

  StepResult result;
  result.observation =
      Observe(ego_, ped_, config_.pedestrian_present, config_.occluder,
              collision, config_.obs_noise_std, noise_rng_);
  result.status = status_;
  return result;
}

}  // namespace aif
