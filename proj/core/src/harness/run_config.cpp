#include "safelight/harness/run_config.hpp"

#include <cmath>
#include <fstream>

#include "safelight/common/error.hpp"
#include "safelight/common/rng.hpp"

namespace safelight::harness {

const char* to_string(Backbone b) { return b == Backbone::dqn ? "dqn" : "ppo"; }
const char* to_string(StateEncoding e) { return e == StateEncoding::grid ? "grid" : "lane"; }

namespace {

Backbone backbone_from_string(const std::string& s) {
  if (s == "dqn" || s == "3dqn") return Backbone::dqn;
  if (s == "ppo") return Backbone::ppo;
  throw ConfigError("backbone", "unknown backbone '" + s + "'");
}

StateEncoding encoding_from_string(const std::string& s) {
  if (s == "grid") return StateEncoding::grid;
  if (s == "lane") return StateEncoding::lane;
  throw ConfigError("state_encoding", "unknown encoding '" + s + "'");
}

template <typename T>
T field(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(key, "has the wrong type");
  }
}

}  // namespace

void RunConfig::validate() const {
  variant.validate();
  agent.validate();
  if (!scenario.geometry) throw ConfigError("scenario", "not loaded");
  if (!std::isfinite(episode_s) || episode_s <= 0.0) throw ConfigError("episode_s", "must be > 0");
  if (train_episodes < 0) throw ConfigError("train_episodes", "must be >= 0");
  if (eval_runs < 1) throw ConfigError("eval_runs", "must be >= 1");
  if (detector_window_s <= 0.0) throw ConfigError("detector_window_s", "must be > 0");
  if (backbone == Backbone::ppo) {
    if (variant.embeds_safety())
      throw ConfigError("variant.kind", std::string(variants::to_string(variant.kind)) + " is not supported with ppo");
    if (variant.kind == variants::VariantKind::syn_q)
      throw ConfigError("variant.kind", "syn_q needs Q-value heads; use the dqn backbone");
  }
}

std::vector<std::size_t> RunConfig::hidden() const {
  return encoding == StateEncoding::grid ? agent.grid_hidden : agent.hidden;
}

RunConfig run_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("config", "expected an object");
  RunConfig c;
  if (j.contains("scenario_inline")) {
    c.scenario = scenario_from_json(j.at("scenario_inline"));
  } else {
    if (!j.contains("scenario")) throw ConfigError("scenario", "missing");
    std::filesystem::path p = field<std::string>(j, "scenario", "");
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    c.scenario_path = p.string();
    c.scenario = load_scenario(p);
  }
  if (j.contains("ignore_foe_prob")) {
    c.scenario.demand.ignore_foe_prob = field<double>(j, "ignore_foe_prob", 0.0);
    if (c.scenario.demand.ignore_foe_prob < 0.0 || c.scenario.demand.ignore_foe_prob > 1.0)
      throw ConfigError("ignore_foe_prob", "must be in [0, 1]");
  }
  if (j.contains("demand_scale")) {
    const double k = field<double>(j, "demand_scale", 1.0);
    if (!(k >= 0.0)) throw ConfigError("demand_scale", "must be >= 0");
    for (auto& segs : c.scenario.demand.rates)
      for (auto& s : segs) s.vph *= k;
  }
  if (j.contains("sim")) c.scenario.sim = sim::sim_config_from_json(j.at("sim"));
  if (j.contains("variant")) c.variant = variants::variant_config_from_json(j.at("variant"));
  if (j.contains("agent")) c.agent = agents::agent_config_from_json(j.at("agent"));
  c.backbone = backbone_from_string(field<std::string>(j, "backbone", "dqn"));
  c.encoding = encoding_from_string(
      field<std::string>(j, "state_encoding", c.backbone == Backbone::ppo ? "lane" : "grid"));
  try {
    c.mode = signal::action_mode_from_string(field<std::string>(j, "action_mode", "cyclic"));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError("action_mode", e.what());
  }
  c.episode_s = field<double>(j, "episode_s", c.episode_s);
  c.train_episodes = field<int>(j, "train_episodes", c.mode == signal::ActionMode::cyclic ? 300 : 500);
  c.eval_runs = field<int>(j, "eval_runs", c.eval_runs);
  c.master_seed = field<std::uint64_t>(j, "seed", c.master_seed);
  c.detector_window_s = field<double>(j, "detector_window_s", c.detector_window_s);
  if (j.contains("rules")) c.rules = safety::rules_from_json(j.at("rules"));
  c.name = field<std::string>(j, "name", variants::to_string(c.variant.kind));
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config", path.string() + ": " + e.what());
  }
  return run_config_from_json(j, path.parent_path());
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j{{"name", c.name},
                   {"variant", variants::to_json(c.variant)},
                   {"agent", agents::to_json(c.agent)},
                   {"backbone", to_string(c.backbone)},
                   {"state_encoding", to_string(c.encoding)},
                   {"action_mode", signal::to_string(c.mode)},
                   {"episode_s", c.episode_s},
                   {"train_episodes", c.train_episodes},
                   {"eval_runs", c.eval_runs},
                   {"seed", c.master_seed},
                   {"detector_window_s", c.detector_window_s},
                   {"rules", safety::to_json(c.rules)}};
  j["scenario_inline"] = to_json(c.scenario);
  return j;
}

std::uint64_t eval_seed(const RunConfig& c, int run) { return c.master_seed + static_cast<std::uint64_t>(run); }

std::uint64_t train_seed(const RunConfig& c, int episode) {
  return mix_seed(c.master_seed, 1000 + static_cast<std::uint64_t>(episode));
}

std::uint64_t agent_seed(const RunConfig& c) { return mix_seed(c.master_seed, 7); }

}  // namespace safelight::harness
