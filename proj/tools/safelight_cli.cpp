// safelight: train / eval / compare / sweep / replay for the single-intersection lab.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "safelight/common/error.hpp"
#include "safelight/harness/experiment.hpp"
#include "safelight/harness/report.hpp"
#include "safelight/sim/event_log.hpp"

namespace fs = std::filesystem;
using namespace safelight;
using namespace safelight::harness;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

fs::path output_dir(const std::string& flag) {
  if (const char* env = std::getenv("SAFELIGHT_OUTPUT_DIR"); env && *env) return env;
  return flag.empty() ? fs::path("runs") : fs::path(flag);
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw ConfigError("config", "cannot open " + p.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config", p.string() + ": " + e.what());
  }
}

struct Overrides {
  long long seed = -1;
  int episodes = -1;
  int runs = -1;
};

RunConfig load(const fs::path& path, const Overrides& o, const nlohmann::json& patch = nullptr) {
  auto j = read_json(path);
  if (!patch.is_null()) j.merge_patch(patch);
  if (o.seed >= 0) j["seed"] = o.seed;
  if (o.episodes >= 0) j["train_episodes"] = o.episodes;
  if (o.runs >= 0) j["eval_runs"] = o.runs;
  return run_config_from_json(j, path.parent_path());
}

void log_row(const CurveRow& r) {
  std::cerr << "episode " << r.episode << "  wait " << format_number(r.avg_waiting_s) << " s  collisions "
            << r.collisions << "  eps " << format_number(r.epsilon) << "\n";
}

TrainResult train_and_save(const RunConfig& cfg, const fs::path& dir, bool quiet) {
  auto result = train(cfg, quiet ? ProgressFn{} : ProgressFn{log_row});
  write_text(dir / "curve.csv", curve_csv(result.curve));
  if (result.learner) result.checkpoint.save(dir / "checkpoint.json");
  write_text(dir / "config.json", to_json(cfg).dump(2) + "\n");
  return result;
}

void save_eval(const EvalResult& ev, const fs::path& dir) {
  write_text(dir / "eval_runs.csv", eval_runs_csv(ev));
  write_text(dir / "eval.json", eval_json(ev).dump(2) + "\n");
}

// Trained learner for cfg: from `<dir>/checkpoint.json` when present,
// otherwise trained now.
std::unique_ptr<Learner> obtain_learner(const RunConfig& cfg, const fs::path& dir, bool quiet) {
  auto learner = make_learner(cfg);
  if (!learner) return nullptr;
  if (fs::exists(dir / "checkpoint.json")) {
    learner->restore(nn::Checkpoint::load(dir / "checkpoint.json"));
    return learner;
  }
  return std::move(train_and_save(cfg, dir, quiet).learner);
}

// Sets a dotted path such as "variant.w2" inside a JSON object.
void set_path(nlohmann::json& j, const std::string& dotted, double value) {
  nlohmann::json* node = &j;
  std::stringstream ss(dotted);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  if (parts.empty()) throw ConfigError("sweep.param", "empty parameter path");
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) node = &(*node)[parts[i]];
  (*node)[parts.back()] = value;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SafeLight traffic-signal lab: train, evaluate and compare RL controllers"};
  app.require_subcommand(1);
  std::string out_flag;
  bool quiet = false;
  app.add_option("-o,--out", out_flag, "output directory (SAFELIGHT_OUTPUT_DIR overrides)");
  app.add_flag("-q,--quiet", quiet, "no per-episode progress on stderr");

  Overrides ov;
  std::string config;
  std::vector<std::string> configs;
  std::string checkpoint;
  std::string event_log;

  auto* train_cmd = app.add_subcommand("train", "train the configured variant and write curve + checkpoint");
  train_cmd->add_option("-c,--config", config, "run config")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--seed", ov.seed, "master seed override");
  train_cmd->add_option("--episodes", ov.episodes, "training episode override");

  auto* eval_cmd = app.add_subcommand("eval", "greedy evaluation on held-out seeds");
  eval_cmd->add_option("-c,--config", config, "run config")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--checkpoint", checkpoint, "checkpoint from train (not needed for fixed_time)");
  eval_cmd->add_option("--seed", ov.seed, "master seed override");
  eval_cmd->add_option("--runs", ov.runs, "number of evaluation runs");
  eval_cmd->add_option("--event-log", event_log, "write the first run's event log (JSON lines) here");

  auto* compare_cmd = app.add_subcommand("compare", "evaluate several configs on shared seeds and tabulate deltas");
  compare_cmd->add_option("-c,--config", configs, "run configs")->required()->check(CLI::ExistingFile);
  compare_cmd->add_option("--seed", ov.seed, "master seed override");
  compare_cmd->add_option("--runs", ov.runs, "number of evaluation runs");
  compare_cmd->add_option("--episodes", ov.episodes, "training episode override");

  std::string param;
  std::vector<double> values;
  auto* sweep_cmd = app.add_subcommand("sweep", "train and evaluate over a grid of one weight");
  sweep_cmd->add_option("-c,--config", config, "base run config")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--param", param, "dotted config path, e.g. variant.w2")->required();
  sweep_cmd->add_option("--values", values, "grid values")->required()->delimiter(',');
  sweep_cmd->add_option("--seed", ov.seed, "master seed override");
  sweep_cmd->add_option("--runs", ov.runs, "number of evaluation runs");
  sweep_cmd->add_option("--episodes", ov.episodes, "training episode override");

  std::string scenario;
  double margin = 0.5;
  auto* replay_cmd = app.add_subcommand("replay", "re-run the collision detector over a recorded event log");
  replay_cmd->add_option("--log", event_log, "event log from eval --event-log")->required()->check(CLI::ExistingFile);
  replay_cmd->add_option("--scenario", scenario, "scenario file the log was produced on")
      ->required()
      ->check(CLI::ExistingFile);
  replay_cmd->add_option("--margin", margin, "collision margin in metres");

  CLI11_PARSE(app, argc, argv);

  try {
    const fs::path out = output_dir(out_flag);
    if (*train_cmd) {
      const auto cfg = load(config, ov);
      const auto result = train_and_save(cfg, out / cfg.name, quiet);
      std::cout << "wrote " << (out / cfg.name).string() << " (" << result.curve.size() << " curve rows)\n";
    } else if (*eval_cmd) {
      const auto cfg = load(config, ov);
      auto learner = make_learner(cfg);
      if (learner) {
        if (checkpoint.empty()) throw ConfigError("checkpoint", "required for variant " + cfg.name);
        learner->restore(nn::Checkpoint::load(checkpoint));
      }
      const auto ev = evaluate(cfg, learner.get(), cfg.eval_runs);
      save_eval(ev, out / cfg.name);
      if (!event_log.empty()) {
        sim::EventLog log(true);
        EpisodeOptions opt;
        opt.log = &log;
        run_episode(cfg, learner.get(), eval_seed(cfg, 0), 0, opt);
        log.save(event_log);
      }
      std::cout << eval_json(ev).dump(2) << "\n";
    } else if (*compare_cmd) {
      std::vector<EvalResult> results;
      for (const auto& c : configs) {
        const auto cfg = load(c, ov);
        auto learner = obtain_learner(cfg, out / cfg.name, quiet);
        results.push_back(evaluate(cfg, learner.get(), cfg.eval_runs));
        save_eval(results.back(), out / cfg.name);
      }
      const auto rows = compare(results);
      write_text(out / "compare.csv", compare_csv(rows));
      write_text(out / "compare.txt", compare_table(rows));
      std::cout << compare_table(rows);
    } else if (*sweep_cmd) {
      std::ostringstream csv;
      csv << "# schema=safelight-sweep/1\n" << param;
      for (const auto& m : metric_names()) csv << ',' << m;
      csv << "\n";
      for (double v : values) {
        nlohmann::json patch = nlohmann::json::object();
        set_path(patch, param, v);
        auto cfg = load(config, ov, patch);
        cfg.name += "-" + param + "=" + format_number(v);
        auto learner = train_and_save(cfg, out / cfg.name, quiet).learner;
        const auto ev = evaluate(cfg, learner.get(), cfg.eval_runs);
        save_eval(ev, out / cfg.name);
        csv << format_number(v);
        for (const auto& m : metric_names()) csv << ',' << format_number(ev.aggregate.at(m).mean);
        csv << "\n";
      }
      write_text(out / "sweep.csv", csv.str());
      std::cout << csv.str();
    } else if (*replay_cmd) {
      const auto sc = load_scenario(scenario);
      const auto rep = sim::replay_collisions(*sc.geometry, sim::EventLog::load(event_log), margin);
      std::cout << "ticks " << rep.ticks << ", logged collisions " << rep.logged << ", recomputed "
                << rep.recomputed << "\n";
      for (const auto& m : rep.mismatches) std::cout << "mismatch: " << m << "\n";
      if (!rep.consistent()) return kExitRuntime;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
