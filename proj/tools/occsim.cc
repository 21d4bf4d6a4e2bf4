// occsim: command-line front end for episodes, sweeps, comparisons and the
// latency grid.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "aif/config.h"
#include "aif/harness.h"

namespace {

namespace fs = std::filesystem;

std::vector<std::string> SplitList(const std::string& text, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> ParseDoubles(const std::string& text) {
  std::vector<double> out;
  for (const std::string& s : SplitList(text)) {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("bad number: " + s);
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty value list");
  return out;
}

std::vector<int> ParseInts(const std::string& text) {
  std::vector<int> out;
  for (double v : ParseDoubles(text)) {
    if (v != static_cast<int>(v) || v < 1) {
      throw std::invalid_argument("expected positive integers: " + text);
    }
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::vector<aif::PedestrianMode> ParseModes(const std::string& text) {
  if (text.empty() || text == "all") {
    return {std::begin(aif::kAllModes), std::end(aif::kAllModes)};
  }
  std::vector<aif::PedestrianMode> out;
  for (const std::string& s : SplitList(text)) {
    const auto mode = aif::ParseMode(s);
    if (!mode) throw std::invalid_argument("unknown mode: " + s);
    out.push_back(*mode);
  }
  return out;
}

std::ofstream OpenOut(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(17);
  return out;
}

void PrintPooled(const aif::ExperimentTable& table) {
  for (const aif::TableRow& row : table.rows) {
    if (row.mode) continue;
    const aif::MetricsSummary& m = row.metrics;
    std::cout << row.label << ": n=" << m.n_episodes << " CR=" << m.collision_rate
              << " +- " << m.collision_rate_se << " PR=" << m.pass_rate;
    if (m.pass_time) {
      std::cout << " PT=" << m.pass_time->mean << " +- " << m.pass_time->se;
    }
    std::cout << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Occluded-pedestrian simulator and planner experiments"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON config overriding defaults")
      ->check(CLI::ExistingFile);

  // run
  auto* run = app.add_subcommand("run", "Run one episode");
  std::string agent_name = "ours";
  std::string mode_name = "sudden_appearance";
  std::uint64_t seed = 1;
  std::string log_path;
  bool diagnostics = false;
  run->add_option("--agent", agent_name, "ours | reactive | rule");
  run->add_option("--mode", mode_name,
                  "hesitant | deceptive | turning_back | sudden_stop | "
                  "sudden_appearance");
  run->add_option("--seed", seed, "Episode seed");
  run->add_option("--log", log_path, "Write the JSONL step log here");
  run->add_flag("--diagnostics", diagnostics, "Include planner diagnostics in the log");

  // ablate
  auto* ablate = app.add_subcommand("ablate", "Ablation sweep over one parameter");
  std::string axis_name = "rho_h";
  std::string values_text;
  int n_per_cell = 0;
  std::string out_dir = "results";
  std::string modes_text = "all";
  ablate->add_option("--axis", axis_name, "rho_h | b0");
  ablate->add_option("--values", values_text, "Comma separated values")->required();
  ablate->add_option("--n-per-cell", n_per_cell, "Episodes per (value, mode) cell");
  ablate->add_option("--out", out_dir, "Output directory");
  ablate->add_option("--modes", modes_text, "Comma separated modes or 'all'");

  // compare
  auto* compare = app.add_subcommand("compare", "Compare agents on matched seeds");
  std::string agents_text = "ours,reactive,rule";
  compare->add_option("--agents", agents_text, "Comma separated agents");
  compare->add_option("--n-per-cell", n_per_cell, "Episodes per (agent, mode) cell");
  compare->add_option("--out", out_dir, "Output directory");
  compare->add_option("--modes", modes_text, "Comma separated modes or 'all'");

  // bench
  auto* bench = app.add_subcommand("bench", "Planning latency over an N x M grid");
  std::string grid_text = "100,200,300,500x100,200,400";
  int repeats = 5;
  int loops = 10;
  std::string bench_out;
  bench->add_option("--grid", grid_text, "N values x M values, e.g. 100,200x100,400");
  bench->add_option("--repeats", repeats, "Independent repetitions");
  bench->add_option("--loops", loops, "Agent steps averaged per repetition");
  bench->add_option("--out", bench_out, "CSV output file (default: stdout)");

  // config
  auto* show = app.add_subcommand("config", "Print the effective configuration");

  CLI11_PARSE(app, argc, argv);

  try {
    aif::SimulationConfig config =
        config_path.empty() ? aif::SimulationConfig{} : aif::LoadConfigFile(config_path);
    if (n_per_cell != 0) config.harness.episodes_per_cell = n_per_cell;
    config.Validate();

    if (show->parsed()) {
      std::cout << aif::ConfigToJson(config).dump(2) << '\n';
      return 0;
    }

    if (run->parsed()) {
      const auto agent = aif::ParseAgent(agent_name);
      if (!agent) throw std::invalid_argument("unknown agent: " + agent_name);
      const auto mode = aif::ParseMode(mode_name);
      if (!mode) throw std::invalid_argument("unknown mode: " + mode_name);
      const aif::EpisodeRecord record =
          aif::RunEpisode(*agent, *mode, seed, config, {diagnostics});
      if (!log_path.empty()) {
        std::ofstream out = OpenOut(log_path);
        aif::WriteEpisodeLog(out, record);
      }
      const aif::EpisodeOutcome o =
          aif::SummarizeEpisode(record, config.env.collision.radius);
      std::cout << "status=" << aif::StatusName(o.status) << " t=" << o.duration;
      if (o.min_distance) std::cout << " min_distance=" << *o.min_distance;
      std::cout << " min_ttc=" << o.min_ttc << '\n';
      return 0;
    }

    if (ablate->parsed()) {
      const auto axis = aif::ParseAxis(axis_name);
      if (!axis) throw std::invalid_argument("unknown axis: " + axis_name);
      const aif::ExperimentTable table = aif::AblationSweep(
          *axis, ParseDoubles(values_text), config, ParseModes(modes_text));
      const fs::path dir(out_dir);
      const std::string stem = "ablate_" + std::string(aif::AxisName(*axis));
      std::ofstream csv = OpenOut(dir / (stem + ".csv"));
      aif::WriteTableCsv(csv, table, aif::AxisName(*axis));
      std::ofstream eps = OpenOut(dir / (stem + "_episodes.csv"));
      aif::WriteEpisodesCsv(eps, table);
      PrintPooled(table);
      return 0;
    }

    if (compare->parsed()) {
      std::vector<aif::AgentKind> agents;
      for (const std::string& s : SplitList(agents_text)) {
        const auto a = aif::ParseAgent(s);
        if (!a) throw std::invalid_argument("unknown agent: " + s);
        agents.push_back(*a);
      }
      if (agents.empty()) throw std::invalid_argument("no agents given");
      const aif::ExperimentTable table =
          aif::CompareAgents(agents, config, ParseModes(modes_text));
      const fs::path dir(out_dir);
      std::ofstream csv = OpenOut(dir / "compare.csv");
      aif::WriteTableCsv(csv, table, "agent");
      std::ofstream eps = OpenOut(dir / "compare_episodes.csv");
      aif::WriteEpisodesCsv(eps, table);
      PrintPooled(table);
      return 0;
    }

    if (bench->parsed()) {
      const std::vector<std::string> axes = SplitList(grid_text, 'x');
      if (axes.size() != 2) throw std::invalid_argument("grid must be N_LIST x M_LIST");
      const auto cells = aif::BenchLatency(ParseInts(axes[0]), ParseInts(axes[1]),
                                           repeats, loops, config);
      if (bench_out.empty()) {
        aif::WriteLatencyCsv(std::cout, cells);
      } else {
        std::ofstream out = OpenOut(bench_out);
        aif::WriteLatencyCsv(out, cells);
      }
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
