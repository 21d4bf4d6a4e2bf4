#include "aif/config.h"

#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace aif {
namespace {

using nlohmann::json;

json Vec(const Vec2& v) { return json::array({v.x(), v.y()}); }
Vec2 ToVec(const json& j) { return Vec2(j.at(0).get<double>(), j.at(1).get<double>()); }
json Interval(const Range& r) { return json::array({r.lo, r.hi}); }
Range ToRange(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

// Rejects keys that the default document does not have and values whose
// JSON kind differs from the default.
void CheckOverrides(const json& defaults, const json& overrides,
                    const std::string& path) {
  if (defaults.is_object()) {
    if (!overrides.is_object()) {
      throw std::invalid_argument("config: " + path + " must be an object");
    }
    for (const auto& [key, value] : overrides.items()) {
      const std::string child = path.empty() ? key : path + "." + key;
      if (!defaults.contains(key)) {
        throw std::invalid_argument("config: unknown key " + child);
      }
      CheckOverrides(defaults.at(key), value, child);
    }
    return;
  }
  if (defaults.is_array()) {
    if (!overrides.is_array() || overrides.size() != defaults.size()) {
      throw std::invalid_argument("config: " + path + " must be an array of " +
                                  std::to_string(defaults.size()));
    }
    for (std::size_t i = 0; i < defaults.size(); ++i) {
      CheckOverrides(defaults[i], overrides[i], path + "[" + std::to_string(i) + "]");
    }
    return;
  }
  if (defaults.is_boolean() != overrides.is_boolean() ||
      defaults.is_number() != overrides.is_number()) {
    throw std::invalid_argument("config: wrong type for " + path);
  }
  if (defaults.is_number_integer() && !overrides.is_number_integer()) {
    throw std::invalid_argument("config: " + path + " must be an integer");
  }
}

}  // namespace

void HarnessConfig::Validate() const {
  if (episodes_per_cell < 1) {
    throw std::invalid_argument("harness.episodes_per_cell must be >= 1");
  }
  if (workers < 1) throw std::invalid_argument("harness.workers must be >= 1");
}

void SimulationConfig::Validate() const {
  env.Validate();
  agent.belief.Validate();
  agent.planner.Validate();
  rule.Validate();
  harness.Validate();
}

json ConfigToJson(const SimulationConfig& c) {
  const EnvConfig& e = c.env;
  const BeliefConfig& b = c.agent.belief;
  const PlannerConfig& p = c.agent.planner;
  json j;
  j["env"] = {
      {"dt", e.dt},
      {"max_steps", e.max_steps},
      {"ego_init",
       {{"position", Vec(e.ego_init.position)},
        {"velocity", Vec(e.ego_init.velocity)}}},
      {"occluder",
       {{"center", Vec(e.occluder.center)},
        {"length", e.occluder.length},
        {"width", e.occluder.width}}},
      {"collision",
       {{"radius", e.collision.radius},
        {"ego_length", e.collision.ego_length},
        {"ego_width", e.collision.ego_width}}},
      {"goal_x", e.goal_x},
      {"action_bounds",
       {{"min", Vec(e.action_bounds.min)}, {"max", Vec(e.action_bounds.max)}}},
      {"obs_noise_std", Vec(e.obs_noise_std)},
      {"seed", e.seed},
      {"hesitant_reverse_fraction", e.hesitant_reverse_fraction},
      {"ped_prior_mean", Vec(e.ped_prior_mean)},
      {"ped_prior_std", Vec(e.ped_prior_std)},
      {"pedestrian_present", e.pedestrian_present},
  };
  j["belief"] = {
      {"num_particles", b.num_particles},
      {"initial_existence", b.initial_existence},
      {"eps_fn", b.eps_fn},
      {"eps_fp", b.eps_fp},
      {"eps_c", b.eps_c},
      {"process_noise_rate",
       json::array({b.process_noise_rate(0), b.process_noise_rate(1),
                    b.process_noise_rate(2), b.process_noise_rate(3)})},
      {"measurement_std", Vec(b.measurement_std)},
      {"ess_threshold", b.ess_threshold},
      {"conditional_reset", b.conditional_reset},
      {"anchor_mean", Vec(b.anchor_mean)},
      {"anchor_std", Vec(b.anchor_std)},
      {"anchor_position_sigma", Vec(b.anchor_position_sigma)},
      {"anchor_velocity_sigma", Vec(b.anchor_velocity_sigma)},
      {"d_act", Interval(b.d_act)},
      {"v_target", Interval(b.v_target)},
      {"a_cap", Interval(b.a_cap)},
  };
  j["planner"] = {
      {"num_candidates", p.num_candidates},
      {"horizon", p.horizon},
      {"cem_iters", p.cem_iters},
      {"elite_frac", p.elite_frac},
      {"lambda", p.lambda},
      {"gamma", p.gamma},
      {"rho_h", p.rho_h},
      {"kappa_c", p.preference.kappa_c},
      {"v_des", p.preference.v_des},
      {"sigma_v", p.preference.sigma_v},
      {"sigma_y", p.preference.sigma_y},
      {"w_eps", p.preference.w_eps},
      {"initial_std", Vec(p.initial_std)},
      {"std_floor", p.std_floor},
  };
  j["rule"] = {
      {"caution_zone_start", c.rule.caution_zone_start},
      {"caution_zone_end", c.rule.caution_zone_end},
      {"v_caution", c.rule.v_caution},
      {"speed_gain", c.rule.speed_gain},
  };
  j["harness"] = {
      {"episodes_per_cell", c.harness.episodes_per_cell},
      {"base_seed", c.harness.base_seed},
      {"workers", c.harness.workers},
  };
  return j;
}

SimulationConfig ConfigFromJson(const json& overrides) {
  json j = ConfigToJson(SimulationConfig{});
  CheckOverrides(j, overrides, "");
  j.merge_patch(overrides);

  SimulationConfig c;
  const json& e = j.at("env");
  c.env.dt = e.at("dt").get<double>();
  c.env.max_steps = e.at("max_steps").get<int>();
  c.env.ego_init.position = ToVec(e.at("ego_init").at("position"));
  c.env.ego_init.velocity = ToVec(e.at("ego_init").at("velocity"));
  c.env.occluder.center = ToVec(e.at("occluder").at("center"));
  c.env.occluder.length = e.at("occluder").at("length").get<double>();
  c.env.occluder.width = e.at("occluder").at("width").get<double>();
  c.env.collision.radius = e.at("collision").at("radius").get<double>();
  c.env.collision.ego_length = e.at("collision").at("ego_length").get<double>();
  c.env.collision.ego_width = e.at("collision").at("ego_width").get<double>();
  c.env.goal_x = e.at("goal_x").get<double>();
  c.env.action_bounds.min = ToVec(e.at("action_bounds").at("min"));
  c.env.action_bounds.max = ToVec(e.at("action_bounds").at("max"));
  c.env.obs_noise_std = ToVec(e.at("obs_noise_std"));
  c.env.seed = e.at("seed").get<std::uint64_t>();
  c.env.hesitant_reverse_fraction = e.at("hesitant_reverse_fraction").get<double>();
  c.env.ped_prior_mean = ToVec(e.at("ped_prior_mean"));
  c.env.ped_prior_std = ToVec(e.at("ped_prior_std"));
  c.env.pedestrian_present = e.at("pedestrian_present").get<bool>();

  const json& b = j.at("belief");
  BeliefConfig& bc = c.agent.belief;
  bc.num_particles = b.at("num_particles").get<int>();
  bc.initial_existence = b.at("initial_existence").get<double>();
  bc.eps_fn = b.at("eps_fn").get<double>();
  bc.eps_fp = b.at("eps_fp").get<double>();
  bc.eps_c = b.at("eps_c").get<double>();
  for (int i = 0; i < 4; ++i) {
    bc.process_noise_rate(i) = b.at("process_noise_rate").at(i).get<double>();
  }
  bc.measurement_std = ToVec(b.at("measurement_std"));
  bc.ess_threshold = b.at("ess_threshold").get<double>();
  bc.conditional_reset = b.at("conditional_reset").get<bool>();
  bc.anchor_mean = ToVec(b.at("anchor_mean"));
  bc.anchor_std = ToVec(b.at("anchor_std"));
  bc.anchor_position_sigma = ToVec(b.at("anchor_position_sigma"));
  bc.anchor_velocity_sigma = ToVec(b.at("anchor_velocity_sigma"));
  bc.d_act = ToRange(b.at("d_act"));
  bc.v_target = ToRange(b.at("v_target"));
  bc.a_cap = ToRange(b.at("a_cap"));

  const json& p = j.at("planner");
  PlannerConfig& pc = c.agent.planner;
  pc.num_candidates = p.at("num_candidates").get<int>();
  pc.horizon = p.at("horizon").get<int>();
  pc.cem_iters = p.at("cem_iters").get<int>();
  pc.elite_frac = p.at("elite_frac").get<double>();
  pc.lambda = p.at("lambda").get<double>();
  pc.gamma = p.at("gamma").get<double>();
  pc.rho_h = p.at("rho_h").get<double>();
  pc.preference.kappa_c = p.at("kappa_c").get<double>();
  pc.preference.v_des = p.at("v_des").get<double>();
  pc.preference.sigma_v = p.at("sigma_v").get<double>();
  pc.preference.sigma_y = p.at("sigma_y").get<double>();
  pc.preference.w_eps = p.at("w_eps").get<double>();
  pc.initial_std = ToVec(p.at("initial_std"));
  pc.std_floor = p.at("std_floor").get<double>();

  const json& r = j.at("rule");
  c.rule.caution_zone_start = r.at("caution_zone_start").get<double>();
  c.rule.caution_zone_end = r.at("caution_zone_end").get<double>();
  c.rule.v_caution = r.at("v_caution").get<double>();
  c.rule.speed_gain = r.at("speed_gain").get<double>();

  const json& h = j.at("harness");
  c.harness.episodes_per_cell = h.at("episodes_per_cell").get<int>();
  c.harness.base_seed = h.at("base_seed").get<std::uint64_t>();
  c.harness.workers = h.at("workers").get<int>();

  c.Validate();
  return c;
}

SimulationConfig LoadConfigFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config: " + path + ": " + e.what());
  }
  return ConfigFromJson(j);
}

}  // namespace aif
