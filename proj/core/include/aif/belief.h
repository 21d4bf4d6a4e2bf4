#ifndef AIF_BELIEF_H_
#define AIF_BELIEF_H_

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "aif/rng.h"
#include "aif/types.h"
#include "aif/world.h"

namespace aif {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

// Gaussian over pedestrian (x, y, vx, vy).
struct GaussianBelief {
  Vec4 mean = Vec4::Zero();
  Mat4 covariance = Mat4::Identity();

  Vec2 Position() const { return mean.head<2>(); }
  Vec2 Velocity() const { return mean.tail<2>(); }
};

// Behavioural hypothesis carried by a particle. The pedestrian stays put until
// the ego is closer than `d_act`, then accelerates laterally at `a_cap`
// towards `v_target`.
struct BehaviorHypothesis {
  double d_act = 15.0;
  double v_target = 6.0;
  double a_cap = 6.0;
};

// Counterfactual maneuver used inside planning rollouts only.
enum class Maneuver { kNominal, kSurge, kReverse, kFreeze };

struct Particle {
  double weight = 1.0;
  bool exists = false;
  GaussianBelief kinematics;
  GaussianBelief anchor;  // initial kinematic hypothesis, never modified
  BehaviorHypothesis hypothesis;
  Maneuver maneuver = Maneuver::kNominal;
};

struct Belief {
  std::vector<Particle> particles;
  int step = 0;

  // B(z_p) = sum of weights of existing particles.
  double ExistenceProbability() const;
  double EffectiveSampleSize() const;
  double WeightSum() const;
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct BeliefConfig {
  int num_particles = 100;
  double initial_existence = 0.8;  // B_0(z_p)

  // Detection model.
  double eps_fn = 0.01;  // missed detection of an exposed pedestrian
  double eps_fp = 0.01;  // spurious detection
  double eps_c = 0.01;   // collision flag disagreement

  // Q = diag(process_noise_rate) * dt; R = diag(measurement_std^2).
  Vec4 process_noise_rate{0.01, 0.01, 0.25, 0.25};
  Vec2 measurement_std{0.05, 0.05};

  double ess_threshold = 0.5;  // resample when N_eff < ess_threshold * N
  bool conditional_reset = true;

  // Prior over the anchor (initial pedestrian state).
  Vec2 anchor_mean{12.0, -4.0};
  Vec2 anchor_std{2.0 / 3.0, 2.0 / 3.0};
  Vec2 anchor_position_sigma{0.5, 0.5};
  Vec2 anchor_velocity_sigma{0.5, 0.5};

  // Hypothesis priors, pooled across behavioural modes.
  Range d_act{10.0, 25.0};
  Range v_target{4.0, 8.0};
  Range a_cap{4.0, 8.0};

  void Validate() const;
};

// Visibility flags predicted for one particle.
struct OcclusionFlags {
  bool visible = false;   // o_p: predicted pedestrian position in view
  bool resolved = false;  // o_r: o_p or the anchor position in view
};

OcclusionFlags ComputeFlags(const Particle& particle, const Vec2& ego_position,
                            const Occluder& occluder);

// Throws std::invalid_argument for N < 1 or B_0 outside [0, 1].
Belief InitBelief(const BeliefConfig& config, const Occluder& occluder,
                  RandomStream& rng);

// Lateral acceleration of the nominal hypothesis automaton.
double NominalLateralControl(const BehaviorHypothesis& hypothesis,
                             double ped_x, double lateral_velocity,
                             double ego_x, double dt);

struct PredictResult {
  Belief prior;
  std::vector<OcclusionFlags> flags;
};

// Propagates every existing particle's Kalman filter one step under its
// hypothesis. Weights carry over unchanged.
PredictResult Predict(const Belief& belief, const KinematicState& ego,
                      const WorldModel& world, const BeliefConfig& config);

// Reverts kinematics to the anchor iff the pedestrian is unobserved and the
// particle's occlusion is unresolved.
Particle ConditionalReset(const Particle& prior, bool observed,
                          bool resolved);

struct ReweightResult {
  std::vector<double> weights;
  bool degenerate = false;  // every likelihood vanished; weights reset
};

// Posterior weights from the detection, measurement and collision
// likelihoods. `flags` are the (post-reset) occlusion flags per particle.
ReweightResult Reweight(const std::vector<Particle>& particles,
                        const Observation& obs,
                        const std::vector<OcclusionFlags>& flags,
                        const KinematicState& ego, const WorldModel& world,
                        const BeliefConfig& config);

// Kalman position update. Repairs a numerically non-PSD covariance.
Particle KfCorrect(const Particle& particle, const Vec2& measurement,
                   const Eigen::Matrix2d& measurement_cov);

// Indices selected by systematic resampling with offset `u` in [0, 1).
std::vector<std::size_t> SystematicResampleIndices(
    const std::vector<double>& weights, std::size_t count, double u);

// Resamples when the effective sample size drops below
// `ess_threshold * N`; otherwise returns the belief unchanged.
Belief SystematicResample(const Belief& belief, double ess_threshold,
                          RandomStream& rng);

// Full correction cycle: predict, conditional reset, reweight, Kalman
// correction when observed, resample.
Belief UpdateBelief(const Belief& belief, const Observation& obs,
                    const KinematicState& ego, const WorldModel& world,
                    const BeliefConfig& config, RandomStream& rng);

struct BeliefSummary {
  double existence = 0.0;
  Vec2 mean_position = Vec2::Zero();  // over existing mass; zero if none
  double covariance_trace = 0.0;      // weighted over existing mass
  double effective_sample_size = 0.0;
};

BeliefSummary Summarize(const Belief& belief);

}  // namespace aif

#endif  // AIF_BELIEF_H_
