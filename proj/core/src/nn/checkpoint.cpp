#include "safelight/nn/checkpoint.hpp"

#include <fstream>

#include "safelight/common/error.hpp"

namespace safelight::nn {

using nlohmann::json;

json to_json(const Mlp& net) {
  json layers = json::array();
  for (const auto& l : net.layers()) {
    layers.push_back({
        {"rows", l.weight.rows()},
        {"cols", l.weight.cols()},
        {"activation", to_string(l.activation)},
        {"weight", std::vector<double>(l.weight.data(), l.weight.data() + l.weight.size())},
        {"bias", std::vector<double>(l.bias.data(), l.bias.data() + l.bias.size())},
    });
  }
  return {{"dims", net.dims()}, {"layers", layers}};
}

Mlp mlp_from_json(const json& j) {
  std::vector<DenseLayer> layers;
  for (const auto& jl : j.at("layers")) {
    DenseLayer l;
    const auto rows = jl.at("rows").get<Eigen::Index>();
    const auto cols = jl.at("cols").get<Eigen::Index>();
    const auto w = jl.at("weight").get<std::vector<double>>();
    const auto b = jl.at("bias").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(w.size()) != rows * cols)
      throw DimensionError("checkpoint weight size", static_cast<std::size_t>(rows * cols), w.size());
    if (static_cast<Eigen::Index>(b.size()) != rows)
      throw DimensionError("checkpoint bias size", static_cast<std::size_t>(rows), b.size());
    l.weight = Eigen::Map<const Matrix>(w.data(), rows, cols);
    l.bias = Eigen::Map<const Vector>(b.data(), rows);
    l.activation = activation_from_string(jl.at("activation").get<std::string>());
    layers.push_back(std::move(l));
  }
  return Mlp(std::move(layers));
}

json to_json(const AdamState& s) {
  return {{"lr", s.config.lr},
          {"beta1", s.config.beta1},
          {"beta2", s.config.beta2},
          {"eps", s.config.eps},
          {"timestep", s.timestep},
          {"first_moment", s.first_moment},
          {"second_moment", s.second_moment}};
}

AdamState adam_state_from_json(const json& j) {
  AdamState s;
  s.config.lr = j.at("lr").get<double>();
  s.config.beta1 = j.at("beta1").get<double>();
  s.config.beta2 = j.at("beta2").get<double>();
  s.config.eps = j.at("eps").get<double>();
  s.timestep = j.at("timestep").get<std::uint64_t>();
  s.first_moment = j.at("first_moment").get<std::vector<std::vector<double>>>();
  s.second_moment = j.at("second_moment").get<std::vector<std::vector<double>>>();
  return s;
}

json Checkpoint::to_json() const {
  json nets = json::object();
  for (const auto& [name, net] : networks) nets[name] = nn::to_json(net);
  json opts = json::object();
  for (const auto& [name, st] : optimizers) opts[name] = nn::to_json(st);
  return {{"format", kCheckpointFormat},
          {"networks", nets},
          {"optimizers", opts},
          {"rng_state", rng_state},
          {"metadata", metadata}};
}

Checkpoint Checkpoint::from_json(const json& j) {
  const auto format = j.value("format", std::string{});
  if (format != kCheckpointFormat) throw Error("checkpoint: unsupported format tag '" + format + "'");
  Checkpoint c;
  for (const auto& [name, jn] : j.at("networks").items()) c.networks.emplace(name, mlp_from_json(jn));
  for (const auto& [name, jo] : j.at("optimizers").items()) c.optimizers.emplace(name, adam_state_from_json(jo));
  c.rng_state = j.value("rng_state", std::string{});
  c.metadata = j.value("metadata", json::object());
  return c;
}

void Checkpoint::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error("checkpoint: cannot write " + path.string());
  out << to_json().dump();
}

Checkpoint Checkpoint::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("checkpoint: cannot read " + path.string());
  return from_json(json::parse(in));
}

}  // namespace safelight::nn
