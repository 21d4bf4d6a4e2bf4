#ifndef AIF_METRICS_H_
#define AIF_METRICS_H_

#include <optional>
#include <vector>

#include "aif/episode_log.h"
#include "aif/world.h"

namespace aif {

inline constexpr double kTtcCap = 10.0;  // [s]

// Range-rate time to collision on center distance minus `radius`. Returns
// nullopt when the pair is not closing; saturates at kTtcCap.
std::optional<double> TimeToCollision(const KinematicState& ego,
                                      const KinematicState& ped, double radius);

// Per-episode quantities the summary statistics are built from.
struct EpisodeOutcome {
  EpisodeStatus status = EpisodeStatus::kRunning;
  double duration = 0.0;                    // [s]
  std::optional<double> min_distance;       // [m], absent without pedestrian
  double min_ttc = kTtcCap;                 // [s]
};

EpisodeOutcome SummarizeEpisode(const EpisodeRecord& record, double radius);

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;   // sample std / sqrt(n); 0 when n < 2
  int n = 0;
  bool se_defined = false;
};

// Sample mean and standard error.
MeanSe ComputeMeanSe(const std::vector<double>& values);

struct MetricsSummary {
  int n_episodes = 0;
  double pass_rate = 0.0;
  double collision_rate = 0.0;
  double timeout_rate = 0.0;
  double pass_rate_se = 0.0;
  double collision_rate_se = 0.0;
  // Over successful (goal reached) runs only; absent when there are none.
  std::optional<MeanSe> pass_time;
  std::optional<MeanSe> min_distance;
  std::optional<MeanSe> min_ttc;
};

// Throws std::invalid_argument on empty input.
MetricsSummary ComputeMetrics(const std::vector<EpisodeOutcome>& outcomes);
MetricsSummary ComputeMetrics(const std::vector<EpisodeRecord>& records,
                              double radius);

}  // namespace aif

#endif  // AIF_METRICS_H_
