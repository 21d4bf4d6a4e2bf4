#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "aif/config.h"
#include "aif/harness.h"
#include "aif/metrics.h"

namespace aif {
namespace {

// small planner so closed-loop tests stay fast
SimulationConfig SmallConfig() {
  SimulationConfig c;
  c.agent.belief.num_particles = 30;
  c.agent.planner.num_candidates = 20;
  c.agent.planner.cem_iters = 2;
  c.harness.episodes_per_cell = 2;
  return c;
}

EpisodeOutcome Outcome(EpisodeStatus s, double t) {
  EpisodeOutcome o;
  o.status = s;
  o.duration = t;
  return o;
}

TEST(MetricsTest, RatesAndConditionalPassTime) {
  const std::vector<EpisodeOutcome> outs = {
      Outcome(EpisodeStatus::kGoalReached, 6.0),
      Outcome(EpisodeStatus::kCollision, 2.0),
      Outcome(EpisodeStatus::kGoalReached, 8.0)};
  const MetricsSummary m = ComputeMetrics(outs);
  EXPECT_EQ(m.n_episodes, 3);
  EXPECT_DOUBLE_EQ(m.collision_rate, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.pass_rate, 2.0 / 3.0);
  EXPECT_EQ(m.timeout_rate, 0.0);
  ASSERT_TRUE(m.pass_time.has_value());
  EXPECT_DOUBLE_EQ(m.pass_time->mean, 7.0);
  EXPECT_DOUBLE_EQ(m.pass_time->se, 1.0);
  // bernoulli standard error with the n - 1 sample std
  EXPECT_NEAR(m.collision_rate_se, std::sqrt(1.0 / 3.0) / std::sqrt(3.0), 1e-12);
}

TEST(MetricsTest, NoSuccessLeavesConditionalMetricsEmpty) {
  const MetricsSummary m = ComputeMetrics(
      std::vector<EpisodeOutcome>{Outcome(EpisodeStatus::kTimeout, 15.0)});
  EXPECT_EQ(m.timeout_rate, 1.0);
  EXPECT_FALSE(m.pass_time.has_value());
  EXPECT_FALSE(m.min_ttc.has_value());
  EXPECT_EQ(m.collision_rate_se, 0.0);
}

TEST(MetricsTest, EmptyInputThrows) {
  EXPECT_THROW(ComputeMetrics(std::vector<EpisodeOutcome>{}), std::invalid_argument);
}

TEST(MetricsTest, SingleValueHasUndefinedSe) {
  const MeanSe one = ComputeMeanSe({4.0});
  EXPECT_FALSE(one.se_defined);
  EXPECT_EQ(one.se, 0.0);
  const MeanSe two = ComputeMeanSe({4.0, 6.0});
  EXPECT_TRUE(two.se_defined);
  EXPECT_DOUBLE_EQ(two.se, 1.0);
}

TEST(TtcTest, HeadOnApproach) {
  KinematicState ego{Vec2(0, 0), Vec2(10, 0), Vec2::Zero()};
  KinematicState ped{Vec2(21, 0), Vec2::Zero(), Vec2::Zero()};
  ASSERT_TRUE(TimeToCollision(ego, ped, 1.0).has_value());
  EXPECT_DOUBLE_EQ(*TimeToCollision(ego, ped, 1.0), 2.0);
}

TEST(TtcTest, SeparatingOrFarPairs) {
  KinematicState ego{Vec2(0, 0), Vec2(5, 0), Vec2::Zero()};
  KinematicState behind{Vec2(-11, 0), Vec2::Zero(), Vec2::Zero()};
  EXPECT_FALSE(TimeToCollision(ego, behind, 1.0).has_value());
  KinematicState far{Vec2(200, 0), Vec2::Zero(), Vec2::Zero()};
  EXPECT_EQ(*TimeToCollision(ego, far, 1.0), kTtcCap);
}

TEST(SummarizeTest, SeparatingEpisodeKeepsTheCap) {
  EpisodeRecord rec;
  for (int i = 1; i <= 3; ++i) {
    StepRecord s;
    s.step = i;
    s.t = 0.1 * i;
    s.ego.position = Vec2(-i, 0);
    s.ego.velocity = Vec2(-1, 0);
    s.ped = KinematicState{Vec2(5, 0), Vec2::Zero(), Vec2::Zero()};
    s.status = i == 3 ? EpisodeStatus::kGoalReached : EpisodeStatus::kRunning;
    rec.steps.push_back(s);
  }
  const EpisodeOutcome o = SummarizeEpisode(rec, 1.0);
  EXPECT_EQ(o.status, EpisodeStatus::kGoalReached);
  EXPECT_DOUBLE_EQ(o.duration, 0.3);
  EXPECT_EQ(o.min_ttc, kTtcCap);
  ASSERT_TRUE(o.min_distance.has_value());
  EXPECT_DOUBLE_EQ(*o.min_distance, 6.0);
}

TEST(SummarizeTest, AbsentPedestrianHasNoDistance) {
  EpisodeRecord rec;
  rec.steps.push_back(StepRecord{});
  EXPECT_FALSE(SummarizeEpisode(rec, 1.0).min_distance.has_value());
}

TEST(HarnessTest, AgentNamesRoundTrip) {
  for (AgentKind k : {AgentKind::kOurs, AgentKind::kReactive, AgentKind::kRule}) {
    EXPECT_EQ(ParseAgent(AgentName(k)), k);
  }
  EXPECT_FALSE(ParseAgent("oracle").has_value());
  EXPECT_EQ(ParseAxis("b0"), SweepAxis::kB0);
  EXPECT_EQ(ParseAxis("rho_h"), SweepAxis::kRhoH);
}

TEST(HarnessTest, ApplyAxisTouchesOneField) {
  const SimulationConfig base;
  const SimulationConfig a = ApplyAxis(base, SweepAxis::kRhoH, 0.7);
  EXPECT_EQ(a.agent.planner.rho_h, 0.7);
  EXPECT_EQ(a.agent.belief.initial_existence, base.agent.belief.initial_existence);
  const SimulationConfig b = ApplyAxis(base, SweepAxis::kB0, 0.2);
  EXPECT_EQ(b.agent.belief.initial_existence, 0.2);
  EXPECT_EQ(b.agent.planner.rho_h, base.agent.planner.rho_h);
}

TEST(HarnessTest, SeedBlocksAreDisjoint) {
  std::set<std::uint64_t> seen;
  for (std::size_t cell = 0; cell < 30; ++cell) {
    for (int i = 0; i < 120; ++i) {
      EXPECT_TRUE(seen.insert(CellSeed(1, cell, 120, i)).second);
    }
  }
}

TEST(HarnessTest, ParallelForVisitsEachIndexOnce) {
  std::vector<int> hits(97, 0);
  ParallelFor(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
  for (int h : hits) EXPECT_EQ(h, 1);
}

TEST(HarnessTest, EpisodesAreDeterministic) {
  const SimulationConfig cfg = SmallConfig();
  for (AgentKind kind : {AgentKind::kOurs, AgentKind::kRule}) {
    std::ostringstream a, b;
    WriteEpisodeLog(a, RunEpisode(kind, PedestrianMode::kTurningBack, 11, cfg));
    WriteEpisodeLog(b, RunEpisode(kind, PedestrianMode::kTurningBack, 11, cfg));
    EXPECT_EQ(a.str(), b.str());
    EXPECT_FALSE(a.str().empty());
  }
}

TEST(HarnessTest, LogRoundTripPreservesMetrics) {
  const SimulationConfig cfg = SmallConfig();
  const EpisodeRecord rec =
      RunEpisode(AgentKind::kOurs, PedestrianMode::kHesitant, 12, cfg, {true});
  std::stringstream buf;
  buf.precision(17);
  WriteEpisodeLog(buf, rec);
  const EpisodeRecord back = ReadEpisodeLog(buf);
  ASSERT_EQ(back.steps.size(), rec.steps.size());
  const EpisodeOutcome a = SummarizeEpisode(rec, 1.0);
  const EpisodeOutcome b = SummarizeEpisode(back, 1.0);
  EXPECT_EQ(a.status, b.status);
  EXPECT_DOUBLE_EQ(a.duration, b.duration);
  ASSERT_EQ(a.min_distance.has_value(), b.min_distance.has_value());
  if (a.min_distance) EXPECT_DOUBLE_EQ(*a.min_distance, *b.min_distance);
  EXPECT_DOUBLE_EQ(a.min_ttc, b.min_ttc);
  // every line is a standalone json object
  std::stringstream again;
  WriteEpisodeLog(again, rec);
  std::string line;
  int lines = 0;
  while (std::getline(again, line)) {
    EXPECT_TRUE(nlohmann::json::accept(line));
    ++lines;
  }
  EXPECT_EQ(lines, static_cast<int>(rec.steps.size()));
}

TEST(HarnessTest, EmptySceneReachesTheGoalForBaselines) {
  SimulationConfig cfg = SmallConfig();
  cfg.env.pedestrian_present = false;
  for (AgentKind kind : {AgentKind::kReactive, AgentKind::kRule}) {
    const EpisodeRecord rec = RunEpisode(kind, PedestrianMode::kHesitant, 13, cfg);
    EXPECT_EQ(rec.outcome(), EpisodeStatus::kGoalReached) << AgentName(kind);
    for (const StepRecord& s : rec.steps) EXPECT_FALSE(s.ped.has_value());
  }
}

TEST(HarnessTest, EmptySceneReachesTheGoalWhenNothingIsExpected) {
  SimulationConfig cfg = SmallConfig();
  cfg.env.pedestrian_present = false;
  cfg.agent.belief.initial_existence = 0.0;
  const EpisodeRecord rec =
      RunEpisode(AgentKind::kOurs, PedestrianMode::kHesitant, 14, cfg);
  EXPECT_EQ(rec.outcome(), EpisodeStatus::kGoalReached);
}

TEST(HarnessTest, PooledRowIsTheMeanOfModeRows) {
  const SimulationConfig cfg = SmallConfig();
  const ExperimentTable t = CompareAgents({AgentKind::kReactive}, cfg);
  ASSERT_EQ(t.rows.size(), std::size(kAllModes) + 1);
  ASSERT_EQ(t.episodes.size(), 2 * std::size(kAllModes));
  double cr = 0.0, pr = 0.0;
  for (std::size_t i = 0; i + 1 < t.rows.size(); ++i) {
    cr += t.rows[i].metrics.collision_rate;
    pr += t.rows[i].metrics.pass_rate;
  }
  const MetricsSummary& pooled = t.rows.back().metrics;
  EXPECT_FALSE(t.rows.back().mode.has_value());
  EXPECT_EQ(pooled.n_episodes, 10);
  EXPECT_NEAR(pooled.collision_rate, cr / std::size(kAllModes), 1e-12);
  EXPECT_NEAR(pooled.pass_rate, pr / std::size(kAllModes), 1e-12);
}

TEST(HarnessTest, ComparisonUsesMatchedSeeds) {
  const SimulationConfig cfg = SmallConfig();
  const ExperimentTable t =
      CompareAgents({AgentKind::kReactive, AgentKind::kRule}, cfg,
                    {PedestrianMode::kSuddenStop});
  ASSERT_EQ(t.episodes.size(), 4u);
  EXPECT_EQ(t.episodes[0].seed, t.episodes[2].seed);
  EXPECT_EQ(t.episodes[1].seed, t.episodes[3].seed);
  EXPECT_NE(t.episodes[0].seed, t.episodes[1].seed);
}

TEST(HarnessTest, SingleEpisodeCellFlagsUndefinedSe) {
  SimulationConfig cfg = SmallConfig();
  cfg.harness.episodes_per_cell = 1;
  const ExperimentTable t = AblationSweep(SweepAxis::kRhoH, {0.0}, cfg,
                                          {PedestrianMode::kSuddenAppearance});
  std::ostringstream csv;
  WriteTableCsv(csv, t, "rho_h");
  std::istringstream in(csv.str());
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(row.back(), '0');
  EXPECT_EQ(t.rows[0].metrics.n_episodes, 1);
}

TEST(HarnessTest, SweepRejectsEmptyValues) {
  EXPECT_THROW(AblationSweep(SweepAxis::kB0, {}, SmallConfig()),
               std::invalid_argument);
  EXPECT_THROW(AblationSweep(SweepAxis::kB0, {1.5}, SmallConfig()),
               std::invalid_argument);
}

TEST(ConfigTest, DefaultsRoundTripThroughJson) {
  const SimulationConfig def;
  const nlohmann::json j = ConfigToJson(def);
  EXPECT_EQ(ConfigToJson(ConfigFromJson(j)), j);
  EXPECT_EQ(ConfigToJson(ConfigFromJson(nlohmann::json::object())), j);
}

TEST(ConfigTest, OverridesApply) {
  const SimulationConfig c = ConfigFromJson(
      nlohmann::json::parse(R"({"planner": {"rho_h": 0.5}})"));
  EXPECT_EQ(c.agent.planner.rho_h, 0.5);
}

TEST(ConfigTest, UnknownKeysAndBadTypesThrow) {
  EXPECT_THROW(ConfigFromJson(nlohmann::json::parse(R"({"plannr": {}})")),
               std::invalid_argument);
  EXPECT_THROW(
      ConfigFromJson(nlohmann::json::parse(R"({"planner": {"rho": 0.5}})")),
      std::invalid_argument);
  EXPECT_THROW(
      ConfigFromJson(nlohmann::json::parse(R"({"planner": {"rho_h": "high"}})")),
      std::invalid_argument);
}

TEST(ConfigTest, ValidationNamesTheField) {
  SimulationConfig c;
  c.agent.planner.rho_h = 1.5;
  try {
    c.Validate();
    FAIL() << "expected a throw";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("rho_h"), std::string::npos);
  }
}

TEST(LatencyTest, GridShapeAndCsv) {
  SimulationConfig cfg = SmallConfig();
  const auto cells = BenchLatency({10, 20}, {5}, 2, 2, cfg);
  ASSERT_EQ(cells.size(), 2u);
  for (const LatencyCell& c : cells) EXPECT_GT(c.mean_ms, 0.0);
  std::ostringstream out;
  WriteLatencyCsv(out, cells);
  const std::string csv = out.str();
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}

}  // namespace
}  // namespace aif
