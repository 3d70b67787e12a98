#pragma once

#include <filesystem>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "safelight/nn/adam.hpp"
#include "safelight/nn/mlp.hpp"

namespace safelight::nn {

inline constexpr const char* kCheckpointFormat = "safelight-checkpoint/1";

nlohmann::json to_json(const Mlp& net);
Mlp mlp_from_json(const nlohmann::json& j);

nlohmann::json to_json(const AdamState& state);
AdamState adam_state_from_json(const nlohmann::json& j);

// Self-describing JSON checkpoint: named networks (architecture + row-major
// parameters), named optimizer states, the RNG state and free-form metadata.
struct Checkpoint {
  std::map<std::string, Mlp> networks;
  std::map<std::string, AdamState> optimizers;
  std::string rng_state;
  nlohmann::json metadata = nlohmann::json::object();

  nlohmann::json to_json() const;
  static Checkpoint from_json(const nlohmann::json& j);

  void save(const std::filesystem::path& path) const;
  static Checkpoint load(const std::filesystem::path& path);
};

}  // namespace safelight::nn
