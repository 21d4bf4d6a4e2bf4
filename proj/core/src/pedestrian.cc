#include <algorithm>
#include <cmath>
#include <type_traits>

#include "aif/world.h"

namespace aif {
namespace {

constexpr double kStopTolerance = 0.01;  // [m]

// Largest speed from which the pedestrian can still stop within `remaining`
// meters when braking at `accel` under semi-implicit Euler.
double StoppableSpeed(double remaining, double accel, double dt) {
  if (remaining <= 0.0) return 0.0;
  return accel * (-dt + std::sqrt(dt * dt + 2.0 * remaining / accel));
}

}  // namespace

PedestrianStep StepPedestrian(const KinematicState& ped,
                              const ScenarioParams& params,
                              const KinematicState& ego,
                              const PedestrianMemory& memory, double dt,
                              const EnvConfig& config, RandomStream& rng) {
  PedestrianStep out{ped, memory};
  PedestrianMemory& mem = out.memory;
  const double gap = ped.position.x() - ego.position.x();

  if (!mem.activated && gap < params.d_act) mem.activated = true;
  if (!mem.activated || mem.halted) {
    out.state.velocity.setZero();
    out.state.acceleration.setZero();
    return out;
  }

  const double lateral = ped.position.y() - config.occluder.CurbY();
  const double vy = ped.velocity.y();
  double v_cmd = params.v_max;

  std::visit(
      [&](const auto& spec) {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, HesitantParams>) {
          if (mem.moving_phase && mem.phase_time >= spec.movement_duration) {
            mem.moving_phase = false;
            mem.reversing = rng.Bernoulli(0.5);
            mem.phase_time = 0.0;
          } else if (!mem.moving_phase &&
                     mem.phase_time >= spec.hesitation_duration) {
            mem.moving_phase = true;
            mem.phase_time = 0.0;
          }
          if (!mem.moving_phase) {
            v_cmd = mem.reversing
                        ? -config.hesitant_reverse_fraction * params.v_max
                        : 0.0;
          }
          mem.phase_time += dt;
        } else if constexpr (std::is_same_v<T, DeceptiveParams>) {
          if (gap < spec.trigger_distance) mem.triggered = true;
          v_cmd = mem.triggered ? params.v_max : spec.slow_speed;
        } else if constexpr (std::is_same_v<T, TurningBackParams>) {
          if (!mem.triggered &&
              (lateral >= spec.turn_offset || gap < spec.trigger_distance)) {
            mem.triggered = true;
          }
          if (mem.triggered) {
            // retreat to the starting point on the sidewalk
            const double back = ped.position.y() -
                                params.ped_initial_position.y();
            v_cmd = back <= kStopTolerance
                        ? 0.0
                        : -std::min(params.v_max,
                                    StoppableSpeed(back, params.a_max, dt));
          }
        } else if constexpr (std::is_same_v<T, SuddenStopParams>) {
          const double remaining = spec.stop_offset - lateral;
          v_cmd = remaining <= kStopTolerance
                      ? 0.0
                      : std::min(params.v_max,
                                 StoppableSpeed(remaining, params.a_max, dt));
        }
      },
      params.specific);

  // Track the commanded lateral speed with saturated acceleration; land on
  // the command exactly when it is reachable within one step.
  const double max_dv = params.a_max * dt;
  double vy_next = std::abs(v_cmd - vy) <= max_dv
                       ? v_cmd
                       : vy + std::copysign(max_dv, v_cmd - vy);
  vy_next = std::clamp(vy_next, -params.v_max, params.v_max);

  out.state.velocity = Vec2(0.0, vy_next);
  out.state.acceleration = Vec2(0.0, (vy_next - vy) / dt);
  out.state.position = ped.position + out.state.velocity * dt;

  if (std::holds_alternative<SuddenStopParams>(params.specific) &&
      v_cmd == 0.0 && vy_next == 0.0) {
    mem.halted = true;
  }
  return out;
}

}  // namespace aif
