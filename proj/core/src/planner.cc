#include "aif/planner.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <spdlog/spdlog.h>

namespace aif {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Distinct (state, hypothesis, maneuver) of existing particles with their
// pooled weight. Resampled beliefs carry many duplicates.
struct RolloutGroup {
  double weight = 0.0;
  PedestrianMean start;
  BehaviorHypothesis hypothesis;
  Maneuver maneuver = Maneuver::kNominal;
};

auto GroupKey(const Particle& p) {
  const Vec4& m = p.kinematics.mean;
  return std::make_tuple(m(0), m(1), m(2), m(3), p.hypothesis.d_act,
                         p.hypothesis.v_target, p.hypothesis.a_cap,
                         static_cast<int>(p.maneuver));
}

std::vector<RolloutGroup> GroupParticles(const Belief& belief,
                                         double* total_weight) {
  std::vector<std::size_t> order;
  double total = 0.0;
  for (std::size_t i = 0; i < belief.particles.size(); ++i) {
    const Particle& p = belief.particles[i];
    total += p.weight;
    if (p.exists && p.weight > 0.0) order.push_back(i);
  }
  *total_weight = total;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return GroupKey(belief.particles[a]) < GroupKey(belief.particles[b]);
  });

  std::vector<RolloutGroup> groups;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const Particle& p = belief.particles[order[k]];
    if (k > 0 && GroupKey(belief.particles[order[k - 1]]) == GroupKey(p)) {
      groups.back().weight += p.weight;
      continue;
    }
    groups.push_back({p.weight, RolloutStart(p), p.hypothesis, p.maneuver});
  }
  return groups;
}

// Squared radius of the disc outside which no collision is possible.
double CollisionReachSquared(const CollisionGeometry& geometry) {
  const double reach =
      0.5 * std::hypot(geometry.ego_length, geometry.ego_width) +
      geometry.radius;
  return reach * reach;
}

}  // namespace

void PlannerConfig::Validate() const {
  if (num_candidates < 1) throw std::invalid_argument("planner.M must be >= 1");
  if (horizon < 1) throw std::invalid_argument("planner.T must be >= 1");
  if (cem_iters < 1) throw std::invalid_argument("planner.cem_iters must be >= 1");
  if (!(elite_frac > 0.0 && elite_frac <= 1.0)) {
    throw std::invalid_argument("planner.elite_frac must lie in (0, 1]");
  }
  if (!(lambda > 0.0)) throw std::invalid_argument("planner.lambda must be > 0");
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("planner.gamma must lie in (0, 1]");
  }
  if (!(rho_h >= 0.0 && rho_h <= 1.0)) {
    throw std::invalid_argument("planner.rho_h must lie in [0, 1]");
  }
  if (!(preference.sigma_v > 0.0 && preference.sigma_y > 0.0)) {
    throw std::invalid_argument("planner preference sigmas must be > 0");
  }
  if (!(initial_std.array() > 0.0).all() || !(std_floor > 0.0)) {
    throw std::invalid_argument("planner sampling std must be > 0");
  }
}

PolicyDistribution PolicyDistribution::Initial(int horizon, const Vec2& std) {
  PolicyDistribution d;
  d.mean = ActionMatrix::Zero(horizon, 2);
  d.std = std.transpose().replicate(horizon, 1);
  return d;
}

Belief InjectHypotheses(const Belief& belief, double rho_h, RandomStream& rng) {
  Belief copy = belief;
  std::vector<std::size_t> existing;
  for (std::size_t i = 0; i < copy.particles.size(); ++i) {
    copy.particles[i].maneuver = Maneuver::kNominal;
    if (copy.particles[i].exists) existing.push_back(i);
  }
  const auto count = static_cast<std::size_t>(
      std::lround(rho_h * static_cast<double>(existing.size())));
  // partial Fisher-Yates
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t j = k + rng.Index(existing.size() - k);
    std::swap(existing[k], existing[j]);
    const auto m = static_cast<Maneuver>(1 + rng.Index(3));
    copy.particles[existing[k]].maneuver = m;
  }
  return copy;
}

PedestrianMean RolloutStart(const Particle& particle) {
  PedestrianMean ped{particle.kinematics.Position(),
                     particle.kinematics.Velocity()};
  if (particle.maneuver == Maneuver::kReverse) {
    ped.velocity.y() = -ped.velocity.y();
  } else if (particle.maneuver == Maneuver::kFreeze) {
    ped.velocity.setZero();
  }
  return ped;
}

void AdvancePedestrianMean(PedestrianMean& ped,
                           const BehaviorHypothesis& hypothesis,
                           Maneuver maneuver, double ego_x, double dt) {
  double u = 0.0;
  switch (maneuver) {
    case Maneuver::kNominal:
      u = NominalLateralControl(hypothesis, ped.position.x(), ped.velocity.y(),
                                ego_x, dt);
      break;
    case Maneuver::kSurge:
      u = std::clamp((hypothesis.v_target - ped.velocity.y()) / dt,
                     -hypothesis.a_cap, hypothesis.a_cap);
      break;
    case Maneuver::kReverse:
    case Maneuver::kFreeze:
      break;
  }
  ped.velocity.y() += u * dt;
  ped.position += ped.velocity * dt;
}

RolloutResult Rollout(const Belief& planning_belief, const KinematicState& ego,
                      const Policy& policy, const WorldModel& world) {
  const auto steps = static_cast<std::size_t>(policy.actions.rows());
  const std::size_t n = planning_belief.particles.size();
  RolloutResult out;
  out.ego.reserve(steps);
  out.ped_position.assign(steps, std::vector<Vec2>(n, Vec2::Zero()));
  out.visible.assign(steps, std::vector<char>(n, 0));
  out.collision.assign(steps, std::vector<char>(n, 0));

  std::vector<PedestrianMean> peds(n);
  for (std::size_t i = 0; i < n; ++i) {
    peds[i] = RolloutStart(planning_belief.particles[i]);
  }

  KinematicState e = ego;
  for (std::size_t k = 0; k < steps; ++k) {
    e = StepEgo(e, policy.actions.row(static_cast<Eigen::Index>(k)).transpose(),
                world.dt, world.action_bounds);
    out.ego.push_back(e);
    const Vec2 heading = EgoHeading(e.velocity);
    for (std::size_t i = 0; i < n; ++i) {
      const Particle& p = planning_belief.particles[i];
      AdvancePedestrianMean(peds[i], p.hypothesis, p.maneuver, e.position.x(),
                            world.dt);
      out.ped_position[k][i] = peds[i].position;
      if (!p.exists) continue;
      out.visible[k][i] = IsVisible(e.position, peds[i].position, world.occluder);
      out.collision[k][i] =
          FootprintDistance(e.position, heading, peds[i].position,
                            world.collision) < world.collision.radius;
    }
  }
  return out;
}

double BernoulliEntropy(double p) {
  if (!(p > 0.0 && p < 1.0)) return 0.0;
  return -p * std::log(p) - (1.0 - p) * std::log1p(-p);
}

double LogPreference(const KinematicState& ego, bool collision,
                     const PreferenceWeights& pref) {
  const double dv = ego.velocity.x() - pref.v_des;
  const double y = ego.position.y();
  return -(collision ? pref.kappa_c : 0.0) -
         dv * dv / (2.0 * pref.sigma_v * pref.sigma_v) -
         y * y / (2.0 * pref.sigma_y * pref.sigma_y);
}

EfeBreakdown EvaluateEfe(const RolloutResult& rollout,
                         const std::vector<double>& weights,
                         const PlannerConfig& config) {
  EfeBreakdown out;
  double discount = 1.0;
  for (std::size_t k = 0; k < rollout.ego.size(); ++k) {
    double pragmatic = 0.0;
    double p_vis = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      pragmatic -= weights[i] * LogPreference(rollout.ego[k],
                                              rollout.collision[k][i] != 0,
                                              config.preference);
      if (rollout.visible[k][i]) p_vis += weights[i];
    }
    const double h = BernoulliEntropy(p_vis);
    out.p_vis.push_back(p_vis);
    out.entropy.push_back(h);
    out.pragmatic += discount * pragmatic;
    out.epistemic += discount * config.preference.w_eps * h;
    discount *= config.gamma;
  }
  out.total = out.pragmatic - out.epistemic;
  return out;
}

double ExpectedFreeEnergy(const RolloutResult& rollout,
                          const std::vector<double>& weights,
                          const PlannerConfig& config) {
  return EvaluateEfe(rollout, weights, config).total;
}

std::vector<double> MppiWeights(const std::vector<double>& costs,
                                double lambda) {
  double g_min = kInf;
  for (double g : costs) {
    if (std::isfinite(g)) g_min = std::min(g_min, g);
  }
  if (!std::isfinite(g_min)) return {};
  std::vector<double> w(costs.size(), 0.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < costs.size(); ++i) {
    if (!std::isfinite(costs[i])) continue;
    w[i] = std::exp(-(costs[i] - g_min) / lambda);
    sum += w[i];
  }
  for (double& x : w) x /= sum;
  return w;
}

ActionMatrix WeightedAverage(const std::vector<ActionMatrix>& candidates,
                             const std::vector<double>& weights) {
  ActionMatrix out = ActionMatrix::Zero(candidates.front().rows(), 2);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (weights[i] > 0.0) out += weights[i] * candidates[i];
  }
  return out;
}

Planner::Planner(const PlannerConfig& config, const WorldModel& world)
    : config_(config), world_(world) {
  config_.Validate();
  Reset();
}

void Planner::Reset() {
  distribution_ = PolicyDistribution::Initial(config_.horizon,
                                              config_.initial_std);
}

std::vector<double> Planner::ScoreCandidates(
    const Belief& planning_belief, const KinematicState& ego,
    const std::vector<ActionMatrix>& candidates) const {
  double total_weight = 0.0;
  const std::vector<RolloutGroup> groups =
      GroupParticles(planning_belief, &total_weight);
  const PreferenceWeights& pref = config_.preference;
  const double dt = world_.dt;
  const double reach_sq = CollisionReachSquared(world_.collision);

  std::vector<double> costs(candidates.size(), kInf);
  std::vector<PedestrianMean> peds(groups.size());
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const ActionMatrix& actions = candidates[c];
    for (std::size_t g = 0; g < groups.size(); ++g) peds[g] = groups[g].start;

    KinematicState e = ego;
    double cost = 0.0;
    double discount = 1.0;
    for (Eigen::Index k = 0; k < actions.rows(); ++k) {
      e = StepEgo(e, actions.row(k).transpose(), dt, world_.action_bounds);
      const Vec2 heading = EgoHeading(e.velocity);
      double p_vis = 0.0;
      double p_col = 0.0;
      for (std::size_t g = 0; g < groups.size(); ++g) {
        const RolloutGroup& grp = groups[g];
        AdvancePedestrianMean(peds[g], grp.hypothesis, grp.maneuver,
                              e.position.x(), dt);
        const Vec2& pp = peds[g].position;
        if (IsVisible(e.position, pp, world_.occluder)) p_vis += grp.weight;
        if ((pp - e.position).squaredNorm() < reach_sq &&
            FootprintDistance(e.position, heading, pp, world_.collision) <
                world_.collision.radius) {
          p_col += grp.weight;
        }
      }
      const double ego_term = -LogPreference(e, false, pref);
      const double g_k = total_weight * ego_term + pref.kappa_c * p_col -
                         pref.w_eps * BernoulliEntropy(p_vis);
      cost += discount * g_k;
      discount *= config_.gamma;
    }
    costs[c] = cost;
  }
  return costs;
}

PlanResult Planner::Plan(const Belief& belief, const KinematicState& ego,
                         RandomStream& rng) {
  const Belief planning = InjectHypotheses(belief, config_.rho_h, rng);
  const auto m = static_cast<std::size_t>(config_.num_candidates);
  const int t = config_.horizon;
  const auto n_elite = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::lround(config_.elite_frac * static_cast<double>(m))));
  const ActionBounds& bounds = world_.action_bounds;

  PlanResult result;
  PlanDiagnostics& diag = result.diagnostics;
  for (const Particle& p : planning.particles) {
    if (p.exists) ++diag.maneuver_counts[static_cast<int>(p.maneuver)];
  }

  std::vector<ActionMatrix> candidates(m, ActionMatrix(t, 2));
  std::vector<double> costs;
  double best_so_far = kInf;
  PolicyDistribution dist = distribution_;
  for (int iter = 0; iter < config_.cem_iters; ++iter) {
    for (ActionMatrix& cand : candidates) {
      for (int k = 0; k < t; ++k) {
        for (int j = 0; j < 2; ++j) {
          cand(k, j) = std::clamp(rng.Normal(dist.mean(k, j), dist.std(k, j)),
                                  bounds.min[j], bounds.max[j]);
        }
      }
    }
    costs = ScoreCandidates(planning, ego, candidates);

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return costs[a] < costs[b];
                     });
    if (std::isfinite(costs[order[0]])) {
      best_so_far = std::min(best_so_far, costs[order[0]]);
    }
    diag.best_g_per_iter.push_back(best_so_far);

    std::size_t used = 0;
    ActionMatrix mean = ActionMatrix::Zero(t, 2);
    for (std::size_t e = 0; e < n_elite; ++e) {
      if (!std::isfinite(costs[order[e]])) break;
      mean += candidates[order[e]];
      ++used;
    }
    if (used == 0) continue;
    mean /= static_cast<double>(used);
    ActionMatrix var = ActionMatrix::Zero(t, 2);
    for (std::size_t e = 0; e < used; ++e) {
      var += (candidates[order[e]] - mean).array().square().matrix();
    }
    var /= static_cast<double>(used);
    dist.mean = mean;
    dist.std = var.array().sqrt().max(config_.std_floor).matrix();
  }

  diag.candidate_g = costs;
  diag.final_distribution = dist;
  const std::vector<double> w = MppiWeights(costs, config_.lambda);
  if (w.empty()) {
    spdlog::error("planner: no candidate has a finite cost; braking to zero action");
    diag.fallback = true;
    result.policy.actions = ActionMatrix::Zero(t, 2);
    result.action = Vec2::Zero();
    Reset();
    return result;
  }

  double g_min = kInf;
  double g_sum = 0.0;
  std::size_t finite = 0;
  for (double g : costs) {
    if (!std::isfinite(g)) continue;
    g_min = std::min(g_min, g);
    g_sum += g;
    ++finite;
  }
  diag.g_min = g_min;
  diag.g_mean = g_sum / static_cast<double>(finite);

  result.policy.actions = WeightedAverage(candidates, w);
  result.action = result.policy.actions.row(0).transpose();

  const RolloutResult along =
      Rollout(planning, ego, result.policy, world_);
  std::vector<double> weights;
  weights.reserve(planning.particles.size());
  for (const Particle& p : planning.particles) weights.push_back(p.weight);
  const EfeBreakdown efe = EvaluateEfe(along, weights, config_);
  diag.g_policy = efe.total;
  diag.p_vis = efe.p_vis;

  // warm start: shift one step, pad with zero acceleration
  distribution_ = PolicyDistribution::Initial(t, config_.initial_std);
  if (t > 1) distribution_.mean.topRows(t - 1) = dist.mean.bottomRows(t - 1);
  return result;
}

}  // namespace aif
