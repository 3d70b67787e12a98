// End-to-end acceptance run on the synthetic intersection. Prints one
// PASS/FAIL line per criterion and exits non-zero if any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "safelight/common/error.hpp"
#include "safelight/harness/experiment.hpp"
#include "safelight/harness/run_config.hpp"

using namespace safelight;
using namespace safelight::harness;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;
const Clock::time_point kStart = Clock::now();

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

void progress(const std::string& msg) {
  const double s = std::chrono::duration<double>(Clock::now() - kStart).count();
  std::fprintf(stderr, "[%7.1fs] %s\n", s, msg.c_str());
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw ConfigError(p.string(), "cannot open file");
  return json::parse(in);
}

struct Trained {
  TrainResult train;
  EvalResult eval;
};

double mean_of(const EvalResult& e, const std::string& metric) { return e.aggregate.at(metric).mean; }

std::uint64_t total(const EvalResult& e, std::uint64_t RunRow::*field) {
  std::uint64_t s = 0;
  for (const auto& r : e.runs) s += r.*field;
  return s;
}

Trained train_and_eval(const RunConfig& cfg) {
  progress("train " + cfg.name + " seed " + std::to_string(cfg.master_seed) + " (" +
           std::to_string(cfg.train_episodes) + " episodes)");
  Trained t{train(cfg), {}};
  t.eval = evaluate(cfg, t.train.learner.get(), cfg.eval_runs);
  progress("  " + cfg.name + ": collisions " + num(mean_of(t.eval, "collisions")) + ", waiting " +
           num(mean_of(t.eval, "avg_waiting_s")) + " s");
  return t;
}

EvalResult fixed_time_eval(const RunConfig& cfg) {
  auto r = evaluate(cfg, nullptr, cfg.eval_runs);
  progress("fixed-time seed " + std::to_string(cfg.master_seed) + ": collisions " +
           num(mean_of(r, "collisions")) + ", waiting " + num(mean_of(r, "avg_waiting_s")) +
           " s");
  return r;
}

struct Line {
  bool pass = false;
  std::string detail;
};

void print(int n, const Line& l) {
  std::cout << "criterion " << n << ": " << (l.pass ? "PASS" : "FAIL") << "  " << l.detail << std::endl;
}

std::string pct(double v) { return num(v) + "%"; }

// Results of one setting (action mode x backbone x encoding).
struct Setting {
  std::string label;
  RunConfig base;
  std::map<std::string, Trained> runs;  // backbone, act, reward, loss
  EvalResult fixed;
};

Line safety_reduction(const Setting& s) {
  const double bb = mean_of(s.runs.at("backbone").eval, "collisions");
  bool ok = true;
  std::ostringstream d;
  d << s.label << ": backbone " << num(bb);
  for (const char* v : {"reward", "act"}) {
    const double c = mean_of(s.runs.at(v).eval, "collisions");
    const double red = percent_reduction(bb, c);
    ok = ok && bb > 0.0 && red >= 80.0;
    d << ", " << v << " " << num(c) << " (" << pct(red) << ")";
  }
  const auto& act = s.runs.at("act").eval;
  double coll = 0.0;
  for (const auto& r : act.runs) coll += r.report.collisions;
  const auto change = total(act, &RunRow::change_interval_collisions);
  ok = ok && static_cast<double>(change) == coll;
  d << ", act residual " << num(coll) << " of which change-interval " << change;
  return {ok, d.str()};
}

Line mobility(const Setting& s) {
  const double fixed = mean_of(s.fixed, "avg_waiting_s");
  std::string best;
  double best_wait = 0.0;
  for (const char* v : {"act", "reward", "loss"}) {
    const double w = mean_of(s.runs.at(v).eval, "avg_waiting_s");
    if (best.empty() || w < best_wait) {
      best = v;
      best_wait = w;
    }
  }
  const double change = percent_change(fixed, best_wait);
  return {change <= -15.0, s.label + ": fixed-time " + num(fixed) + " s, best " + best + " " +
                               num(best_wait) + " s (" + pct(change) + ")"};
}

Line act_invariant(const Setting& s) {
  const auto& e = s.runs.at("act").eval;
  const auto ticks = total(e, &RunRow::flagged_permitted_ticks);
  const auto overrides = total(e, &RunRow::override_ticks);
  return {ticks == 0, s.label + ": flagged permitted-green ticks " + std::to_string(ticks) + " over " +
                          std::to_string(e.runs.size()) + " runs (override ticks " + std::to_string(overrides) + ")"};
}

bool same_curves(const std::vector<CurveRow>& a, const std::vector<CurveRow>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& x = a[i];
    const auto& y = b[i];
    if (x.avg_waiting_s != y.avg_waiting_s || x.throughput != y.throughput || x.mean_stopped != y.mean_stopped ||
        x.collisions != y.collisions || x.cumulative_reward != y.cumulative_reward || x.epsilon != y.epsilon ||
        x.batches != y.batches)
      return false;
  }
  return true;
}

bool same_parameters(const nn::Checkpoint& a, const nn::Checkpoint& b) {
  if (a.networks.size() != b.networks.size() || a.rng_state != b.rng_state) return false;
  for (const auto& [name, net] : a.networks) {
    const auto it = b.networks.find(name);
    if (it == b.networks.end()) return false;
    if (nn::to_json(net).dump() != nn::to_json(it->second).dump()) return false;
  }
  return true;
}

// Runs a gtest binary with a filter; true when every selected test passed.
bool run_unit(const std::string& binary, const std::string& filter) {
  const std::string cmd = "\"" + binary + "\" --gtest_brief=1 --gtest_filter='" + filter + "' > /dev/null 2>&1";
  progress("unit tests: " + filter);
  return std::system(cmd.c_str()) == 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SafeLight acceptance run"};
  std::string config_path;
  std::string unit_binary;
  app.add_option("--config", config_path, "acceptance config")->required()->check(CLI::ExistingFile);
  app.add_option("--unit-tests", unit_binary, "unit test binary for the numerical and simulator suites")
      ->required()
      ->check(CLI::ExistingFile);
  CLI11_PARSE(app, argc, argv);

  try {
    const fs::path cfg_file = fs::absolute(config_path);
    const fs::path dir = cfg_file.parent_path();
    const json spec = read_json(cfg_file);

    auto load = [&](const std::string& rel) {
      const fs::path p = dir / rel;
      return std::pair{read_json(p), p.parent_path()};
    };
    auto make = [](json j, const fs::path& base, const std::string& name, const json& variant, int episodes,
                   std::uint64_t seed) {
      j["name"] = name;
      if (!variant.is_null()) j["variant"] = variant;
      if (episodes > 0) j["train_episodes"] = episodes;
      j["seed"] = seed;
      return run_config_from_json(j, base);
    };

    const auto [fixed_json, fixed_dir] = load(spec.at("fixed_time").get<std::string>());
    const auto seeds = spec.at("backbone_seeds").get<std::vector<std::uint64_t>>();
    const std::uint64_t primary = seeds.front();

    std::vector<Setting> settings;
    std::map<std::uint64_t, EvalResult> fixed_by_seed;
    for (auto s : seeds) fixed_by_seed[s] = fixed_time_eval(make(fixed_json, fixed_dir, "fixed_time", {}, 0, s));

    std::vector<double> extra_backbone_collisions;  // cyclic backbone, seeds after the primary
    for (const auto& sj : spec.at("settings")) {
      Setting s;
      s.label = sj.at("label").get<std::string>();
      const auto [bj, bdir] = load(sj.at("base").get<std::string>());
      const int episodes = sj.at("train_episodes").get<int>();
      s.base = make(bj, bdir, "backbone", json{{"kind", "backbone"}}, episodes, primary);
      s.fixed = fixed_by_seed.at(primary);
      s.runs["backbone"] = train_and_eval(s.base);
      for (const auto& [name, v] : sj.at("variants").items())
        s.runs[name] = train_and_eval(make(bj, bdir, name, v, episodes, primary));
      settings.push_back(std::move(s));
    }

    std::vector<Line> lines(11);

    // 1. Backbone collides more than fixed time, on at least 2 of the seeds.
    {
      const Setting& cyc = settings.front();
      const auto [bj, bdir] = load(spec.at("settings").front().at("base").get<std::string>());
      int wins = 0;
      std::ostringstream d;
      for (auto seed : seeds) {
        const double fixed = mean_of(fixed_by_seed.at(seed), "collisions");
        double bb = 0.0;
        if (seed == primary) {
          bb = mean_of(cyc.runs.at("backbone").eval, "collisions");
        } else {
          auto c = make(bj, bdir, "backbone", json{{"kind", "backbone"}}, cyc.base.train_episodes, seed);
          bb = mean_of(train_and_eval(c).eval, "collisions");
        }
        wins += bb > fixed;
        d << "seed " << seed << ": backbone " << num(bb) << " vs fixed " << num(fixed) << "; ";
      }
      lines[1] = {wins * 3 >= static_cast<int>(seeds.size()) * 2, d.str() + std::to_string(wins) + "/" +
                                                                      std::to_string(seeds.size()) + " seeds"};
    }

    // 2-4 on the first setting; 10 repeats them on the others.
    lines[2] = safety_reduction(settings.front());
    lines[3] = mobility(settings.front());
    lines[4] = act_invariant(settings.front());

    // 5. KL term vanishes on all-safe batches of every Loss training run.
    {
      bool ok = true;
      std::ostringstream d;
      std::size_t safe_total = 0;
      for (const auto& s : settings) {
        std::size_t batches = 0, safe = 0;
        double worst = 0.0;
        for (const auto& row : s.runs.at("loss").train.curve) {
          batches += row.batches;
          safe += row.safe_batches;
          worst = std::max(worst, row.max_safe_batch_kl);
        }
        ok = ok && worst <= 1e-5;
        safe_total += safe;
        d << s.label << ": " << safe << "/" << batches << " all-safe batches, max KL " << num(worst)
          << "; ";
      }
      // A run with no all-safe batch would make the check vacuous.
      ok = ok && safe_total > 0;
      lines[5] = {ok, d.str()};
    }

    // 6. Zero weights and a disabled filter reproduce the backbone bit for bit.
    {
      const auto& red = spec.at("reduction");
      bool ok = true;
      std::ostringstream d;
      for (const auto& sj : spec.at("settings")) {
        auto [bj, bdir] = load(sj.at("base").get<std::string>());
        bj["episode_s"] = red.at("episode_s");
        const int episodes = red.at("train_episodes").get<int>();
        const std::string label = sj.at("label").get<std::string>();
        const auto base = train(make(bj, bdir, "backbone", json{{"kind", "backbone"}}, episodes, primary));
        std::size_t batches = 0;
        for (const auto& row : base.curve) batches += row.batches;
        // Without a single gradient step the comparison says nothing.
        ok = ok && batches > 0;
        d << label << " (" << batches << " batches): ";
        const auto base_eval = evaluate(make(bj, bdir, "backbone", json{{"kind", "backbone"}}, episodes, primary),
                                        base.learner.get(), 2);
        for (const auto& v : {json{{"kind", "loss"}, {"lambda2", 0.0}}, json{{"kind", "reward"}, {"lambda_shaping", 0.0}},
                              json{{"kind", "act"}, {"act_filter", false}}}) {
          const auto cfg = make(bj, bdir, v.at("kind").get<std::string>(), v, episodes, primary);
          const auto r = train(cfg);
          const auto e = evaluate(cfg, r.learner.get(), 2);
          bool same = same_curves(base.curve, r.curve) && same_parameters(base.checkpoint, r.checkpoint);
          for (std::size_t i = 0; same && i < e.runs.size(); ++i)
            same = e.runs[i].report.avg_waiting_s == base_eval.runs[i].report.avg_waiting_s &&
                   e.runs[i].report.collisions == base_eval.runs[i].report.collisions;
          ok = ok && same;
          d << cfg.name << (same ? " identical" : " DIFFERS") << "; ";
        }
        progress("reduction checks done for " + label);
      }
      lines[6] = {ok, d.str()};
    }

    // 7 and 8 re-run the relevant unit suites.
    lines[7] = {run_unit(unit_binary,
                         "Mlp.GradientMatchesFiniteDifferences100Seeds:DqnLoss.GradientMatchesFiniteDifferences100Seeds:"
                         "PpoLoss.ActorGradientMatchesFiniteDifferences100Seeds:Dueling.IdentityHoldsOnRandomNetworks:"
                         "Softmax.ShiftInvariance:Kl.NonNegativeOnRandomDistributions:"
                         "PrioritizedReplay.SamplingFrequenciesPassChiSquare:DoubleQ.HandExample"),
                "finite differences, dueling identity, softmax shift, KL sign, replay chi-square, double-Q example"};
    lines[8] = {run_unit(unit_binary,
                         "Collision.DetectorMatchesBruteForceOn1000RandomStates:"
                         "Simulator.ZeroCollisionsWithoutFoeIgnoring20Seeds:Simulator.ProtectedOnlyControlIsCollisionFree:"
                         "Simulator.VehicleConservationEveryTick:Simulator.DeterministicPerSeed"),
                "brute-force collision oracle, p=0 over 20 seeds, conservation, determinism"};

    // 9. Chain MDP for both learners, and the backbone improves while training.
    {
      const bool chain =
          run_unit(unit_binary, "DqnAgent.ChainMdpReachesBellmanFixedPoint:PpoAgent.ChainMdpReachesOptimalPolicy");
      const auto& curve = settings.front().runs.at("backbone").train.curve;
      const auto& w = spec.at("improvement_window");
      const auto first = static_cast<std::size_t>(w.at("first").get<int>());
      const auto last = static_cast<std::size_t>(w.at("last").get<int>());
      bool ok = chain && curve.size() >= first + last;
      double head = 0.0, tail = 0.0;
      if (ok) {
        for (std::size_t i = 0; i < first; ++i) head += curve[i].avg_waiting_s / static_cast<double>(first);
        for (std::size_t i = curve.size() - last; i < curve.size(); ++i)
          tail += curve[i].avg_waiting_s / static_cast<double>(last);
        ok = tail <= 0.8 * head;
      }
      lines[9] = {ok, std::string("chain MDP ") + (chain ? "ok" : "FAILED") + "; backbone waiting first " +
                          std::to_string(first) + " episodes " + num(head) + " s, last " +
                          std::to_string(last) + " " + num(tail) + " s"};
    }

    // 10. Criteria 2-4 on the remaining settings.
    {
      bool ok = settings.size() > 1;
      std::ostringstream d;
      for (std::size_t i = 1; i < settings.size(); ++i) {
        const Line parts[] = {safety_reduction(settings[i]), mobility(settings[i]), act_invariant(settings[i])};
        for (int k = 0; k < 3; ++k) {
          ok = ok && parts[k].pass;
          d << "[" << (k + 2) << " " << (parts[k].pass ? "pass" : "fail") << "] " << parts[k].detail << "; ";
        }
      }
      lines[10] = {ok, d.str()};
    }

    bool all = true;
    for (int n = 1; n <= 10; ++n) {
      print(n, lines[n]);
      all = all && lines[n].pass;
    }
    progress(all ? "all criteria passed" : "some criteria failed");
    return all ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "acceptance: " << e.what() << "\n";
    return 3;
  }
}
