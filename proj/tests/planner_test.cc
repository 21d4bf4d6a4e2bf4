#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "aif/belief.h"
#include "aif/planner.h"

namespace aif {
namespace {

Belief PriorBelief(double b0, std::uint64_t seed, int n = 100) {
  BeliefConfig c;
  c.num_particles = n;
  c.initial_existence = b0;
  RandomStream rng(seed);
  return InitBelief(c, Occluder{}, rng);
}

// A belief with some particles already out on the road and moving.
Belief MixedBelief(std::uint64_t seed) {
  Belief b = PriorBelief(0.7, seed);
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> uy(-4.0, 2.0), uv(-2.0, 5.0);
  for (std::size_t i = 0; i < b.particles.size(); i += 3) {
    b.particles[i].kinematics.mean(1) = uy(gen);
    b.particles[i].kinematics.mean(3) = uv(gen);
  }
  double total = 0.0;
  std::uniform_real_distribution<double> uw(0.1, 1.0);
  for (Particle& p : b.particles) total += (p.weight = uw(gen));
  for (Particle& p : b.particles) p.weight /= total;
  return b;
}

std::vector<double> Weights(const Belief& b) {
  std::vector<double> w;
  for (const Particle& p : b.particles) w.push_back(p.weight);
  return w;
}

bool SameParticles(const Belief& a, const Belief& b) {
  if (a.particles.size() != b.particles.size() || a.step != b.step) return false;
  for (std::size_t i = 0; i < a.particles.size(); ++i) {
    const Particle& p = a.particles[i];
    const Particle& q = b.particles[i];
    if (p.weight != q.weight || p.exists != q.exists ||
        p.kinematics.mean != q.kinematics.mean ||
        p.kinematics.covariance != q.kinematics.covariance ||
        p.anchor.mean != q.anchor.mean ||
        p.anchor.covariance != q.anchor.covariance ||
        p.hypothesis.d_act != q.hypothesis.d_act ||
        p.hypothesis.v_target != q.hypothesis.v_target ||
        p.hypothesis.a_cap != q.hypothesis.a_cap || p.maneuver != q.maneuver) {
      return false;
    }
  }
  return true;
}

TEST(InjectTest, ZeroRatioIsAPlainCopy) {
  const Belief b = PriorBelief(0.8, 1);
  RandomStream rng(2);
  EXPECT_TRUE(SameParticles(InjectHypotheses(b, 0.0, rng), b));
}

TEST(InjectTest, FullRatioInjectsEveryExistingParticle) {
  const Belief b = PriorBelief(1.0, 1);
  RandomStream rng(2);
  for (const Particle& p : InjectHypotheses(b, 1.0, rng).particles) {
    EXPECT_NE(p.maneuver, Maneuver::kNominal);
  }
}

TEST(InjectTest, CountAndManeuverShares) {
  const Belief b = PriorBelief(1.0, 3);
  RandomStream rng(4);
  std::array<int, 4> totals{};
  const int draws = 1000;
  for (int d = 0; d < draws; ++d) {
    const Belief injected = InjectHypotheses(b, 0.3, rng);
    std::array<int, 4> counts{};
    for (const Particle& p : injected.particles) {
      ++counts[static_cast<int>(p.maneuver)];
    }
    ASSERT_EQ(counts[0], 70);
    for (int m = 1; m < 4; ++m) totals[m] += counts[m];
  }
  for (int m = 1; m < 4; ++m) {
    EXPECT_NEAR(totals[m] / (30.0 * draws), 1.0 / 3.0, 0.05);
  }
}

TEST(InjectTest, RoundsOnTheExistingCount) {
  const Belief b = PriorBelief(0.5, 5);
  int existing = 0;
  for (const Particle& p : b.particles) existing += p.exists ? 1 : 0;
  RandomStream rng(6);
  const Belief injected = InjectHypotheses(b, 0.3, rng);
  int count = 0;
  for (const Particle& p : injected.particles) {
    if (p.maneuver != Maneuver::kNominal) {
      EXPECT_TRUE(p.exists);
      ++count;
    }
  }
  EXPECT_EQ(count, std::lround(0.3 * existing));
}

Policy ConstantPolicy(int t, const Vec2& a) {
  Policy p;
  p.actions = ActionMatrix(t, 2);
  p.actions.col(0).setConstant(a.x());
  p.actions.col(1).setConstant(a.y());
  return p;
}

TEST(RolloutTest, NonExistingParticlesNeverCollide) {
  Belief b;
  Particle p;
  p.exists = false;
  p.weight = 1.0;
  p.kinematics.mean << 0.0, 0.0, 0.0, 0.0;  // right where the ego drives
  b.particles.push_back(p);
  KinematicState ego{Vec2(-3, 0), Vec2(5, 0), Vec2::Zero()};
  const RolloutResult r = Rollout(b, ego, ConstantPolicy(40, Vec2::Zero()), WorldModel{});
  for (std::size_t k = 0; k < 40; ++k) {
    EXPECT_EQ(r.collision[k][0], 0);
    EXPECT_EQ(r.visible[k][0], 0);
  }
}

TEST(RolloutTest, FreezeHoldsPosition) {
  Belief b;
  Particle p;
  p.exists = true;
  p.weight = 1.0;
  p.kinematics.mean << 10.0, -1.0, 0.5, 3.0;
  p.hypothesis = {30.0, 6.0, 6.0};
  p.maneuver = Maneuver::kFreeze;
  b.particles.push_back(p);
  KinematicState ego{Vec2(-20, 0), Vec2(10, 0), Vec2::Zero()};
  const RolloutResult r = Rollout(b, ego, ConstantPolicy(40, Vec2::Zero()), WorldModel{});
  for (std::size_t k = 0; k < 40; ++k) {
    EXPECT_EQ(r.ped_position[k][0], Vec2(10.0, -1.0));
  }
}

TEST(RolloutTest, SurgeIgnoresActivationGap) {
  for (double v_target : {3.0, 4.0, 6.0}) {
    Particle p;
    p.exists = true;
    p.hypothesis = {1.0, v_target, 8.0};  // gap far beyond d_act
    PedestrianMean m = RolloutStart(p);
    for (int k = 0; k < 5; ++k) {
      AdvancePedestrianMean(m, p.hypothesis, Maneuver::kSurge, -100.0, 0.1);
    }
    EXPECT_NEAR(m.velocity.y(), std::min(4.0, v_target), 1e-12);
  }
}

TEST(RolloutTest, ReverseNegatesLateralVelocityOnce) {
  Particle p;
  p.kinematics.mean << 10.0, -1.0, 0.0, 2.0;
  p.maneuver = Maneuver::kReverse;
  PedestrianMean m = RolloutStart(p);
  EXPECT_EQ(m.velocity.y(), -2.0);
  for (int k = 0; k < 10; ++k) {
    AdvancePedestrianMean(m, p.hypothesis, Maneuver::kReverse, 9.0, 0.1);
  }
  EXPECT_EQ(m.velocity.y(), -2.0);
  EXPECT_NEAR(m.position.y(), -3.0, 1e-12);
}

TEST(RolloutTest, NominalMatchesBeliefPrediction) {
  // planning rollouts and the filter share the same nominal automaton
  BeliefConfig c;
  WorldModel w;
  Belief b;
  Particle p;
  p.exists = true;
  p.weight = 1.0;
  p.kinematics.mean << 10.0, -4.0, 0.0, 0.0;
  p.hypothesis = {15.0, 5.0, 6.0};
  b.particles.push_back(p);
  KinematicState ego{Vec2(-10, 0), Vec2(10, 0), Vec2::Zero()};
  const Policy pol = ConstantPolicy(20, Vec2::Zero());
  const RolloutResult r = Rollout(b, ego, pol, w);
  Belief tracked = b;
  for (int k = 0; k < 20; ++k) {
    tracked = Predict(tracked, r.ego[k], w, c).prior;
    EXPECT_NEAR((tracked.particles[0].kinematics.Position() - r.ped_position[k][0]).norm(),
                0.0, 1e-12);
  }
}

TEST(EfeTest, EntropyBounds) {
  EXPECT_EQ(BernoulliEntropy(0.0), 0.0);
  EXPECT_EQ(BernoulliEntropy(1.0), 0.0);
  EXPECT_NEAR(BernoulliEntropy(0.5), std::numbers::ln2, 1e-15);
  for (double p = 0.0; p <= 1.0; p += 0.001) {
    const double h = BernoulliEntropy(p);
    EXPECT_GE(h, 0.0);
    EXPECT_LE(h, std::numbers::ln2 + 1e-15);
  }
}

RolloutResult HandRollout(int steps, int particles) {
  RolloutResult r;
  for (int k = 0; k < steps; ++k) {
    KinematicState e;
    e.velocity = Vec2(8.0, 0.0);
    e.position = Vec2(k, 0.5);
    r.ego.push_back(e);
  }
  r.ped_position.assign(steps, std::vector<Vec2>(particles, Vec2::Zero()));
  r.visible.assign(steps, std::vector<char>(particles, 0));
  r.collision.assign(steps, std::vector<char>(particles, 0));
  return r;
}

TEST(EfeTest, UnanimousVisibilityHasNoEpistemicValue) {
  RolloutResult r = HandRollout(5, 4);
  for (auto& row : r.visible) std::fill(row.begin(), row.end(), 1);
  PlannerConfig c;
  const EfeBreakdown e = EvaluateEfe(r, {0.25, 0.25, 0.25, 0.25}, c);
  EXPECT_EQ(e.epistemic, 0.0);
  for (double h : e.entropy) EXPECT_EQ(h, 0.0);
}

TEST(EfeTest, EvenSplitIsWorthLn2PerStep) {
  RolloutResult r = HandRollout(3, 2);
  for (auto& row : r.visible) row[0] = 1;
  PlannerConfig c;
  c.gamma = 1.0;
  const EfeBreakdown e = EvaluateEfe(r, {0.5, 0.5}, c);
  for (double h : e.entropy) EXPECT_NEAR(h, std::numbers::ln2, 1e-15);
  EXPECT_NEAR(e.epistemic, 3.0 * std::numbers::ln2 * c.preference.w_eps, 1e-12);
}

TEST(EfeTest, PragmaticClosedForm) {
  RolloutResult r = HandRollout(2, 2);
  r.collision[1][1] = 1;
  PlannerConfig c;
  c.preference.w_eps = 0.0;
  const auto& pref = c.preference;
  const double base = (8.0 - pref.v_des) * (8.0 - pref.v_des) /
                          (2.0 * pref.sigma_v * pref.sigma_v) +
                      0.25 / (2.0 * pref.sigma_y * pref.sigma_y);
  const double expected = base + c.gamma * (base + 0.4 * pref.kappa_c);
  EXPECT_NEAR(ExpectedFreeEnergy(r, {0.6, 0.4}, c), expected, 1e-12);
}

TEST(EfeTest, CollisionPenaltyIsMonotone) {
  RolloutResult r = HandRollout(4, 2);
  r.collision[2][0] = 1;
  PlannerConfig c;
  const double g1 = ExpectedFreeEnergy(r, {0.5, 0.5}, c);
  c.preference.kappa_c *= 2.0;
  EXPECT_GT(ExpectedFreeEnergy(r, {0.5, 0.5}, c), g1);
}

TEST(MppiTest, ShiftInvariance) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 50.0);
  std::vector<double> g(100);
  for (double& x : g) x = u(gen);
  for (double lambda : {0.1, 1.0, 10.0}) {
    const std::vector<double> w = MppiWeights(g, lambda);
    std::vector<double> shifted = g;
    for (double& x : shifted) x += 1234.5;
    const std::vector<double> ws = MppiWeights(shifted, lambda);
    double sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      EXPECT_NEAR(w[i], ws[i], 1e-12);
      EXPECT_GT(w[i], 0.0);
      sum += w[i];
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(MppiTest, SmallTemperatureSelectsArgmin) {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> n01;
  std::vector<ActionMatrix> cands(20, ActionMatrix(40, 2));
  std::vector<double> g(20);
  for (std::size_t i = 0; i < cands.size(); ++i) {
    for (int k = 0; k < 40; ++k) {
      cands[i](k, 0) = n01(gen);
      cands[i](k, 1) = n01(gen);
    }
    g[i] = 10.0 + i * 0.37 + n01(gen);
  }
  const std::size_t best =
      std::min_element(g.begin(), g.end()) - g.begin();
  const ActionMatrix avg = WeightedAverage(cands, MppiWeights(g, 1e-6));
  EXPECT_LT((avg - cands[best]).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(MppiTest, EqualCostsAverage) {
  std::vector<ActionMatrix> cands = {ActionMatrix::Constant(3, 2, 1.0),
                                     ActionMatrix::Constant(3, 2, -3.0)};
  const ActionMatrix avg = WeightedAverage(cands, MppiWeights({4.2, 4.2}, 1.0));
  EXPECT_TRUE(avg.isApprox(ActionMatrix::Constant(3, 2, -1.0)));
}

TEST(MppiTest, NonFiniteCosts) {
  const double inf = std::numeric_limits<double>::infinity();
  const std::vector<double> w = MppiWeights({inf, 1.0, std::nan("")}, 1.0);
  EXPECT_EQ(w[0], 0.0);
  EXPECT_EQ(w[1], 1.0);
  EXPECT_EQ(w[2], 0.0);
  EXPECT_TRUE(MppiWeights({inf, inf}, 1.0).empty());
}

// The fast scorer groups duplicate particles and skips impossible contacts;
// it must agree with the reference rollout + EFE evaluation.
TEST(ScoreTest, MatchesReferenceRolloutAndEfe) {
  WorldModel w;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    PlannerConfig c;
    Planner planner(c, w);
    RandomStream rng(seed);
    Belief b = MixedBelief(seed);
    // duplicate some particles so grouping kicks in
    for (std::size_t i = 1; i < 20; i += 2) {
      b.particles[i] = b.particles[i - 1];
    }
    const Belief planning = InjectHypotheses(b, 0.5, rng);
    KinematicState ego{Vec2(-8, 0.3), Vec2(7, 0), Vec2::Zero()};
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> n01;
    std::vector<ActionMatrix> cands(30, ActionMatrix(c.horizon, 2));
    for (ActionMatrix& a : cands) {
      for (int k = 0; k < c.horizon; ++k) {
        a(k, 0) = std::clamp(2.0 * n01(gen), -6.0, 4.0);
        a(k, 1) = std::clamp(n01(gen), -3.0, 3.0);
      }
    }
    const std::vector<double> fast = planner.ScoreCandidates(planning, ego, cands);
    const std::vector<double> wts = Weights(planning);
    for (std::size_t i = 0; i < cands.size(); ++i) {
      const double ref =
          ExpectedFreeEnergy(Rollout(planning, ego, Policy{cands[i]}, w), wts, c);
      EXPECT_NEAR(fast[i], ref, 1e-9 * std::max(1.0, std::abs(ref))) << i;
    }
  }
}

TEST(PlanTest, PersistentBeliefIsUntouched) {
  const Belief b = MixedBelief(7);
  const Belief copy = b;
  PlannerConfig c;
  c.rho_h = 0.8;
  Planner planner(c, WorldModel{});
  RandomStream rng(8);
  KinematicState ego{Vec2(-10, 0), Vec2(9, 0), Vec2::Zero()};
  for (int i = 0; i < 3; ++i) planner.Plan(b, ego, rng);
  EXPECT_TRUE(SameParticles(b, copy));
}

TEST(PlanTest, BestSoFarNeverIncreases) {
  const Belief b = PriorBelief(0.8, 9);
  Planner planner(PlannerConfig{}, WorldModel{});
  RandomStream rng(10);
  KinematicState ego{Vec2(-5, 0), Vec2(10, 0), Vec2::Zero()};
  const PlanResult r = planner.Plan(b, ego, rng);
  ASSERT_EQ(r.diagnostics.best_g_per_iter.size(), 8u);
  for (std::size_t i = 1; i < r.diagnostics.best_g_per_iter.size(); ++i) {
    EXPECT_LE(r.diagnostics.best_g_per_iter[i], r.diagnostics.best_g_per_iter[i - 1]);
  }
  EXPECT_LE(r.diagnostics.g_min, r.diagnostics.g_mean);
}

TEST(PlanTest, ActionWithinBoundsAndWarmStartShifts) {
  const Belief b = PriorBelief(0.8, 11);
  PlannerConfig c;
  Planner planner(c, WorldModel{});
  RandomStream rng(12);
  KinematicState ego{Vec2(-5, 0), Vec2(10, 0), Vec2::Zero()};
  const PlanResult r = planner.Plan(b, ego, rng);
  const ActionBounds bounds;
  EXPECT_TRUE((r.action.array() >= bounds.min.array()).all());
  EXPECT_TRUE((r.action.array() <= bounds.max.array()).all());
  const ActionMatrix& final_mean = r.diagnostics.final_distribution.mean;
  const ActionMatrix& next = planner.distribution().mean;
  EXPECT_EQ(next.topRows(c.horizon - 1), final_mean.bottomRows(c.horizon - 1));
  EXPECT_EQ(next.row(c.horizon - 1), ActionMatrix::Zero(1, 2));
}

TEST(PlanTest, SingleCandidateIsReturnedAsIs) {
  const Belief b = PriorBelief(0.8, 13);
  PlannerConfig c;
  c.num_candidates = 1;
  Planner planner(c, WorldModel{});
  RandomStream rng(14);
  KinematicState ego{Vec2(-5, 0), Vec2(10, 0), Vec2::Zero()};
  const PlanResult r = planner.Plan(b, ego, rng);
  ASSERT_EQ(r.diagnostics.candidate_g.size(), 1u);
  EXPECT_NEAR(r.diagnostics.g_policy, r.diagnostics.candidate_g[0],
              1e-9 * std::abs(r.diagnostics.g_policy));
  EXPECT_EQ(r.action, r.policy.actions.row(0).transpose());
}

TEST(PlanTest, DeterministicGivenSeed) {
  const Belief b = MixedBelief(15);
  KinematicState ego{Vec2(-5, 0), Vec2(10, 0), Vec2::Zero()};
  Planner p1(PlannerConfig{}, WorldModel{}), p2(PlannerConfig{}, WorldModel{});
  RandomStream r1(16), r2(16);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(p1.Plan(b, ego, r1).action, p2.Plan(b, ego, r2).action);
  }
}

TEST(PlanTest, NoExistingMassIgnoresThePedestrianPrior) {
  // B0 = 0 and no injection: the occluder prior must not matter at all
  BeliefConfig c1, c2;
  c1.initial_existence = c2.initial_existence = 0.0;
  c2.anchor_mean = Vec2(3.0, -3.0);
  c2.d_act = {1.0, 2.0};
  RandomStream s1(17), s2(18);
  const Belief b1 = InitBelief(c1, Occluder{}, s1);
  const Belief b2 = InitBelief(c2, Occluder{}, s2);
  PlannerConfig pc;
  pc.rho_h = 0.0;
  Planner p1(pc, WorldModel{}), p2(pc, WorldModel{});
  RandomStream r1(19), r2(19);
  KinematicState ego{Vec2(-5, 0), Vec2(10, 0), Vec2::Zero()};
  const PlanResult a = p1.Plan(b1, ego, r1);
  const PlanResult b = p2.Plan(b2, ego, r2);
  EXPECT_EQ(a.policy.actions, b.policy.actions);
  for (double p : a.diagnostics.p_vis) EXPECT_EQ(p, 0.0);
}

TEST(PlannerConfigTest, RejectsInvalid) {
  PlannerConfig c;
  c.lambda = 0.0;
  EXPECT_THROW(c.Validate(), std::invalid_argument);
  c = PlannerConfig{};
  c.elite_frac = 0.0;
  EXPECT_THROW(c.Validate(), std::invalid_argument);
  c = PlannerConfig{};
  c.rho_h = 1.5;
  EXPECT_THROW(c.Validate(), std::invalid_argument);
  c = PlannerConfig{};
  c.gamma = 0.0;
  EXPECT_THROW(c.Validate(), std::invalid_argument);
  EXPECT_THROW(Planner(c, WorldModel{}), std::invalid_argument);
}

}  // namespace
}  // namespace aif
