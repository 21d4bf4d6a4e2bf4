#include "aif/metrics.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aif {

std::optional<double> TimeToCollision(const KinematicState& ego,
                                      const KinematicState& ped,
                                      double radius) {
  const Vec2 rel = ped.position - ego.position;
  const double dist = rel.norm();
  if (dist <= 0.0) return 0.0;
  const double closing = -rel.dot(ped.velocity - ego.velocity) / dist;
  if (!(closing > 0.0)) return std::nullopt;
  return std::clamp((dist - radius) / closing, 0.0, kTtcCap);
}

EpisodeOutcome SummarizeEpisode(const EpisodeRecord& record, double radius) {
  EpisodeOutcome out;
  out.status = record.outcome();
  out.duration = record.duration();
  for (const StepRecord& s : record.steps) {
    if (!s.ped) continue;
    const double d = (s.ped->position - s.ego.position).norm();
    out.min_distance = out.min_distance ? std::min(*out.min_distance, d) : d;
    if (auto ttc = TimeToCollision(s.ego, *s.ped, radius)) {
      out.min_ttc = std::min(out.min_ttc, *ttc);
    }
  }
  return out;
}

MeanSe ComputeMeanSe(const std::vector<double>& values) {
  MeanSe r;
  r.n = static_cast<int>(values.size());
  if (values.empty()) return r;
  double sum = 0.0;
  for (double v : values) sum += v;
  r.mean = sum / static_cast<double>(r.n);
  if (r.n >= 2) {
    double sq = 0.0;
    for (double v : values) sq += (v - r.mean) * (v - r.mean);
    r.se = std::sqrt(sq / static_cast<double>(r.n - 1)) /
           std::sqrt(static_cast<double>(r.n));
    r.se_defined = true;
  }
  return r;
}

MetricsSummary ComputeMetrics(const std::vector<EpisodeOutcome>& outcomes) {
  if (outcomes.empty()) {
    throw std::invalid_argument("compute_metrics needs at least one episode");
  }
  MetricsSummary m;
  m.n_episodes = static_cast<int>(outcomes.size());
  std::vector<double> pass, collide, times, dists, ttcs;
  int timeouts = 0;
  for (const EpisodeOutcome& o : outcomes) {
    const bool ok = o.status == EpisodeStatus::kGoalReached;
    const bool hit = o.status == EpisodeStatus::kCollision;
    pass.push_back(ok ? 1.0 : 0.0);
    collide.push_back(hit ? 1.0 : 0.0);
    if (!ok && !hit) ++timeouts;
    if (!ok) continue;
    times.push_back(o.duration);
    if (o.min_distance) dists.push_back(*o.min_distance);
    ttcs.push_back(o.min_ttc);
  }
  const MeanSe p = ComputeMeanSe(pass);
  const MeanSe c = ComputeMeanSe(collide);
  m.pass_rate = p.mean;
  m.pass_rate_se = p.se;
  m.collision_rate = c.mean;
  m.collision_rate_se = c.se;
  m.timeout_rate = static_cast<double>(timeouts) / m.n_episodes;
  if (!times.empty()) {
    m.pass_time = ComputeMeanSe(times);
    m.min_ttc = ComputeMeanSe(ttcs);
  }
  if (!dists.empty()) m.min_distance = ComputeMeanSe(dists);
  return m;
}

MetricsSummary ComputeMetrics(const std::vector<EpisodeRecord>& records,
                              double radius) {
  std::vector<EpisodeOutcome> outcomes;
  outcomes.reserve(records.size());
  for (const EpisodeRecord& r : records) {
    outcomes.push_back(SummarizeEpisode(r, radius));
  }
  return ComputeMetrics(outcomes);
}

}  // namespace aif
