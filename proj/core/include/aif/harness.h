#ifndef AIF_HARNESS_H_
#define AIF_HARNESS_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aif/agent.h"
#include "aif/config.h"
#include "aif/episode_log.h"
#include "aif/metrics.h"
#include "aif/world.h"

namespace aif {

enum class AgentKind { kOurs, kReactive, kRule };

std::string_view AgentName(AgentKind kind);
std::optional<AgentKind> ParseAgent(std::string_view name);

std::unique_ptr<Agent> MakeAgent(AgentKind kind, const SimulationConfig& config);

struct RunOptions {
  bool record_diagnostics = false;
};

// Closed loop until the episode terminates: act on the latest observation,
// step the environment, log the transition. Deterministic in `seed`.
EpisodeRecord RunEpisode(Agent& agent, const EnvConfig& env,
                         PedestrianMode mode, std::uint64_t seed,
                         const RunOptions& options = {});

// Validates `config` before doing anything.
EpisodeRecord RunEpisode(AgentKind kind, PedestrianMode mode,
                         std::uint64_t seed, const SimulationConfig& config,
                         const RunOptions& options = {});

// Worker count from AIF_WORKERS, falling back to `fallback`.
int WorkerCount(int fallback);

// Runs fn(0..count-1) on up to `workers` threads. Each index runs once.
void ParallelFor(std::size_t count, int workers,
                 const std::function<void(std::size_t)>& fn);

struct EpisodeResult {
  AgentKind agent = AgentKind::kOurs;
  double value = 0.0;  // sweep value; 0 for comparisons
  PedestrianMode mode = PedestrianMode::kSuddenAppearance;
  std::uint64_t seed = 0;
  EpisodeOutcome outcome;
};

struct TableRow {
  std::string label;  // sweep value or agent name
  std::optional<PedestrianMode> mode;  // nullopt for the pooled row
  MetricsSummary metrics;
};

struct ExperimentTable {
  std::vector<TableRow> rows;
  std::vector<EpisodeResult> episodes;  // ordered by cell, then seed
};

enum class SweepAxis { kRhoH, kB0 };

std::optional<SweepAxis> ParseAxis(std::string_view name);
std::string_view AxisName(SweepAxis axis);

// Sets the swept parameter in a copy of `config`.
SimulationConfig ApplyAxis(const SimulationConfig& config, SweepAxis axis,
                           double value);

// Seed of episode `index` in cell `cell`; blocks never overlap.
std::uint64_t CellSeed(std::uint64_t base_seed, std::size_t cell,
                       int episodes_per_cell, int index);

// Ablation over `values` of one parameter for the proposed agent, all five
// modes, `episodes_per_cell` each (taken from config.harness). Per-mode rows
// followed by a pooled row per value.
ExperimentTable AblationSweep(SweepAxis axis, const std::vector<double>& values,
                              const SimulationConfig& config,
                              const std::vector<PedestrianMode>& modes =
                                  {std::begin(kAllModes), std::end(kAllModes)});

// Runs each agent on the same per-mode seed blocks.
ExperimentTable CompareAgents(const std::vector<AgentKind>& agents,
                              const SimulationConfig& config,
                              const std::vector<PedestrianMode>& modes =
                                  {std::begin(kAllModes), std::end(kAllModes)});

// CSV with one row per cell: label, mode, n, PR, CR, PT, MD, TTC with SE
// columns. Conditional metrics print "-" when no run succeeded.
void WriteTableCsv(std::ostream& out, const ExperimentTable& table,
                   std::string_view label_name);
void WriteEpisodesCsv(std::ostream& out, const ExperimentTable& table);

struct LatencyCell {
  int n = 0;
  int m = 0;
  double mean_ms = 0.0;
  double se_ms = 0.0;
};

// Wall time of one full agent step (belief update + plan) per grid cell:
// `repeats` repetitions, each averaging `loops` steps.
std::vector<LatencyCell> BenchLatency(const std::vector<int>& n_values,
                                      const std::vector<int>& m_values,
                                      int repeats, int loops,
                                      const SimulationConfig& config);

void WriteLatencyCsv(std::ostream& out, const std::vector<LatencyCell>& cells);

}  // namespace aif

#endif  // AIF_HARNESS_H_
