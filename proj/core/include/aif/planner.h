#ifndef AIF_PLANNER_H_
#define AIF_PLANNER_H_

#include <array>
#include <vector>

#include <Eigen/Core>

#include "aif/belief.h"
#include "aif/rng.h"
#include "aif/types.h"
#include "aif/world.h"

namespace aif {

// T x 2 matrix of accelerations, one row per planning step.
using ActionMatrix = Eigen::Matrix<double, Eigen::Dynamic, 2>;

// Parameters of the preference distribution P_d and the epistemic weight.
//   log P_d = -kappa_c 1[collision] - (v_long - v_des)^2 / (2 sigma_v^2)
//             - y_e^2 / (2 sigma_y^2)
struct PreferenceWeights {
  double kappa_c = 500.0;  // much lower and the ego never slows before a reveal
  double v_des = 10.0;
  double sigma_v = 2.0;
  double sigma_y = 1.5;
  double w_eps = 1.0;
};

struct PlannerConfig {
  int num_candidates = 100;  // M
  int horizon = 40;          // T
  int cem_iters = 8;
  double elite_frac = 0.2;
  double lambda = 1.0;
  double gamma = 0.99;
  double rho_h = 0.3;
  PreferenceWeights preference;
  Vec2 initial_std{1.5, 0.75};
  double std_floor = 0.05;

  void Validate() const;
};

struct Policy {
  ActionMatrix actions;
};

struct PolicyDistribution {
  ActionMatrix mean;
  ActionMatrix std;

  static PolicyDistribution Initial(int horizon, const Vec2& std);
};

// Returns a copy of `belief` in which round(rho_h * #existing) existing
// particles, chosen uniformly without replacement, carry a counterfactual
// maneuver drawn uniformly from {Surge, Reverse, Freeze}.
Belief InjectHypotheses(const Belief& belief, double rho_h, RandomStream& rng);

// Point-mass pedestrian state used inside rollouts.
struct PedestrianMean {
  Vec2 position = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();
};

// Rollout start state of a particle after its maneuver's initial
// modification (Reverse negates the lateral velocity, Freeze zeroes it).
PedestrianMean RolloutStart(const Particle& particle);

// One rollout step of a particle mean, given the already advanced ego x.
void AdvancePedestrianMean(PedestrianMean& ped,
                           const BehaviorHypothesis& hypothesis,
                           Maneuver maneuver, double ego_x, double dt);

// Predicted observations along a rollout. Indexed [step][particle].
struct RolloutResult {
  std::vector<KinematicState> ego;
  std::vector<std::vector<Vec2>> ped_position;
  std::vector<std::vector<char>> visible;    // o_p
  std::vector<std::vector<char>> collision;  // o_c
};

RolloutResult Rollout(const Belief& planning_belief, const KinematicState& ego,
                      const Policy& policy, const WorldModel& world);

struct EfeBreakdown {
  double total = 0.0;
  double pragmatic = 0.0;  // discounted
  double epistemic = 0.0;  // discounted, already multiplied by w_eps
  std::vector<double> p_vis;
  std::vector<double> entropy;  // per step, before weighting
};

// Bernoulli entropy in nats.
double BernoulliEntropy(double p);

double LogPreference(const KinematicState& ego, bool collision,
                     const PreferenceWeights& preference);

EfeBreakdown EvaluateEfe(const RolloutResult& rollout,
                         const std::vector<double>& weights,
                         const PlannerConfig& config);

double ExpectedFreeEnergy(const RolloutResult& rollout,
                          const std::vector<double>& weights,
                          const PlannerConfig& config);

// Softmax weights exp(-(G - G_min) / lambda), normalized. Non-finite G gets
// zero weight. Returns an empty vector if no G is finite.
std::vector<double> MppiWeights(const std::vector<double>& costs,
                                double lambda);

ActionMatrix WeightedAverage(const std::vector<ActionMatrix>& candidates,
                             const std::vector<double>& weights);

struct PlanDiagnostics {
  double g_min = 0.0;
  double g_mean = 0.0;
  double g_policy = 0.0;  // G of the returned MPPI policy
  std::vector<double> candidate_g;  // final CEM iteration
  std::vector<double> best_g_per_iter;  // best so far, per CEM iteration
  std::vector<double> p_vis;  // along the returned policy
  std::array<int, 4> maneuver_counts{};  // indexed by Maneuver
  PolicyDistribution final_distribution;
  bool fallback = false;  // no finite candidate; zero action returned
};

struct PlanResult {
  Vec2 action = Vec2::Zero();
  Policy policy;
  PlanDiagnostics diagnostics;
};

// MPPI-CEM planner minimizing expected free energy. Holds only the
// warm-started sampling distribution.
class Planner {
 public:
  Planner(const PlannerConfig& config, const WorldModel& world);

  // Plans from `belief`, which is never modified.
  PlanResult Plan(const Belief& belief, const KinematicState& ego,
                  RandomStream& rng);

  // Scores a fixed candidate set against an (already injected) planning
  // belief. Same cost as Rollout + ExpectedFreeEnergy, evaluated faster.
  std::vector<double> ScoreCandidates(const Belief& planning_belief,
                                      const KinematicState& ego,
                                      const std::vector<ActionMatrix>& candidates) const;

  void Reset();

  const PlannerConfig& config() const { return config_; }
  const PolicyDistribution& distribution() const { return distribution_; }

 private:
  PlannerConfig config_;
  WorldModel world_;
  PolicyDistribution distribution_;
};

}  // namespace aif

#endif  // AIF_PLANNER_H_
