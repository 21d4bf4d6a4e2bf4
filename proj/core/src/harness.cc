#include "aif/harness.h"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "aif/baselines.h"

namespace aif {
namespace {

constexpr std::string_view kAgentNames[] = {"ours", "reactive", "rule"};

std::string FormatValue(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

void WriteMeanSe(std::ostream& out, const std::optional<MeanSe>& v) {
  if (v) {
    out << ',' << v->mean << ',' << v->se;
  } else {
    out << ",-,-";
  }
}

// Runs `specs` in parallel and returns outcomes in spec order.
std::vector<EpisodeResult> RunBatch(std::vector<EpisodeResult> specs,
                                    const std::vector<SimulationConfig>& configs,
                                    const std::vector<std::size_t>& config_of,
                                    int workers) {
  ParallelFor(specs.size(), workers, [&](std::size_t i) {
    EpisodeResult& r = specs[i];
    const SimulationConfig& cfg = configs[config_of[i]];
    const EpisodeRecord rec = RunEpisode(r.agent, r.mode, r.seed, cfg);
    r.outcome = SummarizeEpisode(rec, cfg.env.collision.radius);
  });
  return specs;
}

}  // namespace

std::string_view AgentName(AgentKind kind) {
  return kAgentNames[static_cast<int>(kind)];
}

std::optional<AgentKind> ParseAgent(std::string_view name) {
  for (int i = 0; i < 3; ++i) {
    if (kAgentNames[i] == name) return static_cast<AgentKind>(i);
  }
  return std::nullopt;
}

std::unique_ptr<Agent> MakeAgent(AgentKind kind, const SimulationConfig& config) {
  const WorldModel world = WorldModel::FromConfig(config.env);
  switch (kind) {
    case AgentKind::kOurs:
      return std::make_unique<ActiveInferenceAgent>(config.agent, world);
    case AgentKind::kReactive:
      return std::make_unique<ReactiveAgent>(config.agent.planner, world);
    case AgentKind::kRule:
      return std::make_unique<RuleBasedAgent>(config.rule, config.agent.planner,
                                              world);
  }
  throw std::invalid_argument("unknown agent kind");
}

EpisodeRecord RunEpisode(Agent& agent, const EnvConfig& env_config,
                         PedestrianMode mode, std::uint64_t seed,
                         const RunOptions& options) {
  EnvConfig cfg = env_config;
  cfg.seed = seed;
  Environment env(cfg, mode);
  agent.Reset(seed);

  EpisodeRecord record;
  record.agent = std::string(agent.name());
  record.mode = mode;
  record.seed = seed;
  record.steps.reserve(static_cast<std::size_t>(cfg.max_steps));

  Observation obs = env.Reset();
  while (env.status() == EpisodeStatus::kRunning) {
    const Vec2 action = agent.Act(obs, env.ego());
    StepRecord step;
    step.action = action;
    step.belief = agent.belief_summary();
    if (options.record_diagnostics) {
      if (const PlanDiagnostics* d = agent.last_diagnostics()) {
        step.plan = PlanLog{d->g_min, d->g_mean, d->p_vis, d->maneuver_counts};
      }
    }
    const StepResult result = env.Step(action);
    step.step = env.step_count();
    step.t = env.time();
    step.ego = env.ego();
    if (env.pedestrian_present()) step.ped = env.pedestrian();
    step.obs = result.observation;
    step.status = result.status;
    record.steps.push_back(std::move(step));
    obs = result.observation;
  }
  return record;
}

EpisodeRecord RunEpisode(AgentKind kind, PedestrianMode mode,
                         std::uint64_t seed, const SimulationConfig& config,
                         const RunOptions& options) {
  config.Validate();
  const auto agent = MakeAgent(kind, config);
  return RunEpisode(*agent, config.env, mode, seed, options);
}

int WorkerCount(int fallback) {
  if (const char* env = std::getenv("AIF_WORKERS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return std::max(1, fallback);
}

void ParallelFor(std::size_t count, int workers,
                 const std::function<void(std::size_t)>& fn) {
  const auto threads = static_cast<std::size_t>(std::max(1, workers));
  if (threads == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < std::min(threads, count); ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (std::thread& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

std::optional<SweepAxis> ParseAxis(std::string_view name) {
  if (name == "rho_h") return SweepAxis::kRhoH;
  if (name == "b0") return SweepAxis::kB0;
  return std::nullopt;
}

std::string_view AxisName(SweepAxis axis) {
  return axis == SweepAxis::kRhoH ? "rho_h" : "b0";
}

SimulationConfig ApplyAxis(const SimulationConfig& config, SweepAxis axis,
                           double value) {
  SimulationConfig c = config;
  if (axis == SweepAxis::kRhoH) {
    c.agent.planner.rho_h = value;
  } else {
    c.agent.belief.initial_existence = value;
  }
  return c;
}

std::uint64_t CellSeed(std::uint64_t base_seed, std::size_t cell,
                       int episodes_per_cell, int index) {
  return base_seed + cell * static_cast<std::uint64_t>(episodes_per_cell) +
         static_cast<std::uint64_t>(index);
}

ExperimentTable AblationSweep(SweepAxis axis, const std::vector<double>& values,
                              const SimulationConfig& config,
                              const std::vector<PedestrianMode>& modes) {
  if (values.empty()) throw std::invalid_argument("sweep needs at least one value");
  config.Validate();
  const int n = config.harness.episodes_per_cell;

  std::vector<SimulationConfig> configs;
  std::vector<EpisodeResult> specs;
  std::vector<std::size_t> config_of;
  for (std::size_t v = 0; v < values.size(); ++v) {
    configs.push_back(ApplyAxis(config, axis, values[v]));
    configs.back().Validate();
    for (std::size_t m = 0; m < modes.size(); ++m) {
      const std::size_t cell = v * modes.size() + m;
      for (int i = 0; i < n; ++i) {
        EpisodeResult r;
        r.agent = AgentKind::kOurs;
        r.value = values[v];
        r.mode = modes[m];
        r.seed = CellSeed(config.harness.base_seed, cell, n, i);
        specs.push_back(r);
        config_of.push_back(v);
      }
    }
  }

  ExperimentTable table;
  table.episodes = RunBatch(std::move(specs), configs, config_of,
                            WorkerCount(config.harness.workers));

  std::size_t k = 0;
  for (std::size_t v = 0; v < values.size(); ++v) {
    std::vector<EpisodeOutcome> pooled;
    for (std::size_t m = 0; m < modes.size(); ++m) {
      std::vector<EpisodeOutcome> cell;
      for (int i = 0; i < n; ++i, ++k) cell.push_back(table.episodes[k].outcome);
      pooled.insert(pooled.end(), cell.begin(), cell.end());
      table.rows.push_back({FormatValue(values[v]), modes[m], ComputeMetrics(cell)});
    }
    table.rows.push_back({FormatValue(values[v]), std::nullopt, ComputeMetrics(pooled)});
  }
  return table;
}

ExperimentTable CompareAgents(const std::vector<AgentKind>& agents,
                              const SimulationConfig& config,
                              const std::vector<PedestrianMode>& modes) {
  if (agents.empty()) throw std::invalid_argument("compare needs at least one agent");
  config.Validate();
  const int n = config.harness.episodes_per_cell;

  std::vector<EpisodeResult> specs;
  std::vector<std::size_t> config_of;
  for (AgentKind a : agents) {
    for (std::size_t m = 0; m < modes.size(); ++m) {
      for (int i = 0; i < n; ++i) {
        EpisodeResult r;
        r.agent = a;
        r.mode = modes[m];
        // same seeds for every agent: paired comparison
        r.seed = CellSeed(config.harness.base_seed, m, n, i);
        specs.push_back(r);
        config_of.push_back(0);
      }
    }
  }

  ExperimentTable table;
  table.episodes = RunBatch(std::move(specs), {config}, config_of,
                            WorkerCount(config.harness.workers));

  std::size_t k = 0;
  for (AgentKind a : agents) {
    std::vector<EpisodeOutcome> pooled;
    for (PedestrianMode mode : modes) {
      std::vector<EpisodeOutcome> cell;
      for (int i = 0; i < n; ++i, ++k) cell.push_back(table.episodes[k].outcome);
      pooled.insert(pooled.end(), cell.begin(), cell.end());
      table.rows.push_back({std::string(AgentName(a)), mode, ComputeMetrics(cell)});
    }
    table.rows.push_back({std::string(AgentName(a)), std::nullopt,
                          ComputeMetrics(pooled)});
  }
  return table;
}

void WriteTableCsv(std::ostream& out, const ExperimentTable& table,
                   std::string_view label_name) {
  out << label_name
      << ",mode,n,PR,PR_se,CR,CR_se,PT,PT_se,MD,MD_se,TTC,TTC_se,se_defined\n";
  for (const TableRow& row : table.rows) {
    const MetricsSummary& m = row.metrics;
    out << row.label << ',' << (row.mode ? ModeName(*row.mode) : "pooled")
        << ',' << m.n_episodes << ',' << m.pass_rate << ',' << m.pass_rate_se
        << ',' << m.collision_rate << ',' << m.collision_rate_se;
    WriteMeanSe(out, m.pass_time);
    WriteMeanSe(out, m.min_distance);
    WriteMeanSe(out, m.min_ttc);
    out << ',' << (m.n_episodes >= 2 ? 1 : 0) << '\n';
  }
}

void WriteEpisodesCsv(std::ostream& out, const ExperimentTable& table) {
  out << "agent,value,mode,seed,status,duration,min_distance,min_ttc\n";
  for (const EpisodeResult& r : table.episodes) {
    out << AgentName(r.agent) << ',' << r.value << ',' << ModeName(r.mode)
        << ',' << r.seed << ',' << StatusName(r.outcome.status) << ','
        << r.outcome.duration << ',';
    if (r.outcome.min_distance) {
      out << *r.outcome.min_distance;
    } else {
      out << '-';
    }
    out << ',' << r.outcome.min_ttc << '\n';
  }
}

std::vector<LatencyCell> BenchLatency(const std::vector<int>& n_values,
                                      const std::vector<int>& m_values,
                                      int repeats, int loops,
                                      const SimulationConfig& config) {
  if (repeats < 1 || loops < 1) {
    throw std::invalid_argument("bench needs positive repeats and loops");
  }
  using Clock = std::chrono::steady_clock;
  const WorldModel world = WorldModel::FromConfig(config.env);
  std::vector<LatencyCell> cells;
  for (int n : n_values) {
    for (int m : m_values) {
      AgentConfig ac = config.agent;
      ac.belief.num_particles = n;
      ac.planner.num_candidates = m;
      ActiveInferenceAgent agent(ac, world);

      EnvConfig env_cfg = config.env;
      env_cfg.seed = config.harness.base_seed;
      Environment env(env_cfg, PedestrianMode::kSuddenAppearance);
      const Observation obs = env.Reset();

      std::vector<double> per_repeat;
      for (int r = 0; r < repeats; ++r) {
        agent.Reset(config.harness.base_seed + static_cast<std::uint64_t>(r));
        const auto start = Clock::now();
        for (int l = 0; l < loops; ++l) agent.Act(obs, env.ego());
        const std::chrono::duration<double, std::milli> elapsed =
            Clock::now() - start;
        per_repeat.push_back(elapsed.count() / loops);
      }
      const MeanSe stat = ComputeMeanSe(per_repeat);
      cells.push_back({n, m, stat.mean, stat.se});
    }
  }
  return cells;
}

void WriteLatencyCsv(std::ostream& out, const std::vector<LatencyCell>& cells) {
  out << "N,M,mean_ms,se_ms\n";
  for (const LatencyCell& c : cells) {
    out << c.n << ',' << c.m << ',' << c.mean_ms << ',' << c.se_ms << '\n';
  }
}

}  // namespace aif
