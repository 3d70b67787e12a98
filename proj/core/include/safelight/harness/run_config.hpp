#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "safelight/agents/config.hpp"
#include "safelight/harness/scenario.hpp"
#include "safelight/safety/rules.hpp"
#include "safelight/signal/action.hpp"
#include "safelight/variants/variant.hpp"

namespace safelight::harness {

enum class Backbone { dqn, ppo };
enum class StateEncoding { grid, lane };

const char* to_string(Backbone b);
const char* to_string(StateEncoding e);

struct RunConfig {
  std::string name;  // label in comparison tables; defaults to the variant name
  std::string scenario_path;
  Scenario scenario;
  variants::VariantConfig variant;
  agents::AgentConfig agent;
  Backbone backbone = Backbone::dqn;
  StateEncoding encoding = StateEncoding::grid;
  signal::ActionMode mode = signal::ActionMode::cyclic;
  double episode_s = 3600.0;
  int train_episodes = 300;
  int eval_runs = 10;
  std::uint64_t master_seed = 1;
  safety::RuleSet rules = safety::RuleSet::defaults();
  double detector_window_s = 300.0;

  void validate() const;
  std::vector<std::size_t> hidden() const;
};

// Relative scenario paths resolve against base_dir. Optional overrides of the
// scenario: "ignore_foe_prob", "demand_scale", "sim".
RunConfig run_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& c);

// Held-out evaluation seeds: master + run index.
std::uint64_t eval_seed(const RunConfig& c, int run);
std::uint64_t train_seed(const RunConfig& c, int episode);
std::uint64_t agent_seed(const RunConfig& c);

}  // namespace safelight::harness
