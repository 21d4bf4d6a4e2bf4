#include "aif/episode_log.h"

#include <istream>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace aif {
namespace {

using nlohmann::json;

json Vec(const Vec2& v) { return json::array({v.x(), v.y()}); }

Vec2 ToVec(const json& j) {
  return Vec2(j.at(0).get<double>(), j.at(1).get<double>());
}

json State(const KinematicState& s) {
  return {{"pos", Vec(s.position)},
          {"vel", Vec(s.velocity)},
          {"acc", Vec(s.acceleration)}};
}

KinematicState ToState(const json& j) {
  return {ToVec(j.at("pos")), ToVec(j.at("vel")), ToVec(j.at("acc"))};
}

}  // namespace

std::string StepToJson(const StepRecord& step) {
  json j;
  j["t"] = step.t;
  j["step"] = step.step;
  j["ego"] = State(step.ego);
  j["ped"] = step.ped ? State(*step.ped) : json(nullptr);
  j["obs"] = {{"visible", step.obs.ped_visible},
              {"position", step.obs.ped_position ? Vec(*step.obs.ped_position)
                                                 : json(nullptr)},
              {"collision", step.obs.collision}};
  j["action"] = Vec(step.action);
  if (step.belief) {
    j["belief_zp"] = step.belief->existence;
    j["belief"] = {{"B_zp", step.belief->existence},
                   {"mean_position", Vec(step.belief->mean_position)},
                   {"cov_trace", step.belief->covariance_trace},
                   {"n_eff", step.belief->effective_sample_size}};
  } else {
    j["belief_zp"] = nullptr;
  }
  j["status"] = std::string(StatusName(step.status));
  if (step.plan) {
    j["diagnostics"] = {{"G_min", step.plan->g_min},
                        {"G_mean", step.plan->g_mean},
                        {"p_vis", step.plan->p_vis},
                        {"injected",
                         {{"surge", step.plan->maneuver_counts[1]},
                          {"reverse", step.plan->maneuver_counts[2]},
                          {"freeze", step.plan->maneuver_counts[3]}}}};
  }
  return j.dump();
}

StepRecord StepFromJson(const std::string& line) {
  const json j = json::parse(line);
  StepRecord s;
  s.t = j.at("t").get<double>();
  s.step = j.at("step").get<int>();
  s.ego = ToState(j.at("ego"));
  if (!j.at("ped").is_null()) s.ped = ToState(j.at("ped"));
  const json& o = j.at("obs");
  s.obs.ped_visible = o.at("visible").get<bool>();
  if (!o.at("position").is_null()) s.obs.ped_position = ToVec(o.at("position"));
  s.obs.collision = o.at("collision").get<bool>();
  s.action = ToVec(j.at("action"));
  if (j.contains("belief")) {
    const json& b = j.at("belief");
    BeliefSummary summary;
    summary.existence = b.at("B_zp").get<double>();
    summary.mean_position = ToVec(b.at("mean_position"));
    summary.covariance_trace = b.at("cov_trace").get<double>();
    summary.effective_sample_size = b.at("n_eff").get<double>();
    s.belief = summary;
  }
  const auto status = ParseStatus(j.at("status").get<std::string>());
  if (!status) throw std::runtime_error("episode log: unknown status");
  s.status = *status;
  if (j.contains("diagnostics")) {
    const json& d = j.at("diagnostics");
    PlanLog plan;
    plan.g_min = d.at("G_min").get<double>();
    plan.g_mean = d.at("G_mean").get<double>();
    plan.p_vis = d.at("p_vis").get<std::vector<double>>();
    const json& inj = d.at("injected");
    plan.maneuver_counts = {0, inj.at("surge").get<int>(),
                            inj.at("reverse").get<int>(),
                            inj.at("freeze").get<int>()};
    s.plan = plan;
  }
  return s;
}

void WriteEpisodeLog(std::ostream& out, const EpisodeRecord& record) {
  for (const StepRecord& step : record.steps) out << StepToJson(step) << '\n';
}

EpisodeRecord ReadEpisodeLog(std::istream& in) {
  EpisodeRecord record;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    record.steps.push_back(StepFromJson(line));
  }
  return record;
}

}  // namespace aif
