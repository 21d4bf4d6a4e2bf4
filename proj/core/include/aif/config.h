#ifndef AIF_CONFIG_H_
#define AIF_CONFIG_H_

#include <cstdint>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "aif/agent.h"
#include "aif/baselines.h"
#include "aif/world.h"

namespace aif {

struct HarnessConfig {
  int episodes_per_cell = 120;
  std::uint64_t base_seed = 1;
  int workers = 1;  // overridden by AIF_WORKERS when set

  void Validate() const;
};

// Everything an experiment can configure. Defaults are the library defaults.
struct SimulationConfig {
  EnvConfig env;
  AgentConfig agent;
  RuleConfig rule;
  HarnessConfig harness;

  // Throws std::invalid_argument naming the first offending field.
  void Validate() const;
};

// Full JSON view of a configuration; the default instance documents the
// schema (see the README).
nlohmann::json ConfigToJson(const SimulationConfig& config);

// Applies the keys present in `overrides` on top of the defaults. Unknown
// keys and type mismatches throw std::invalid_argument.
SimulationConfig ConfigFromJson(const nlohmann::json& overrides);

SimulationConfig LoadConfigFile(const std::string& path);

}  // namespace aif

#endif  // AIF_CONFIG_H_
