#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "safelight/harness/episode.hpp"
#include "safelight/harness/run_config.hpp"
#include "safelight/nn/checkpoint.hpp"

namespace safelight::harness {

struct CurveRow {
  int episode = 0;
  std::uint64_t seed = 0;
  bool evaluation_only = false;
  double avg_waiting_s = 0.0;
  double throughput = 0.0;
  double mean_stopped = 0.0;
  double collisions = 0.0;
  double cumulative_reward = 0.0;
  double epsilon = 0.0;
  double intervention_rate = 0.0;
  std::size_t batches = 0;
  std::size_t safe_batches = 0;
  double max_safe_batch_kl = 0.0;
  double mean_kl = 0.0;
};

struct TrainResult {
  std::vector<CurveRow> curve;
  std::unique_ptr<Learner> learner;  // null for fixed-time
  nn::Checkpoint checkpoint;
};

using ProgressFn = std::function<void(const CurveRow&)>;

// Runs cfg.train_episodes exploring episodes. The fixed-time variant has
// nothing to train; its curve holds one evaluation row per eval seed instead.
TrainResult train(const RunConfig& cfg, const ProgressFn& progress = {});

struct RunRow {
  sim::EpisodeReport report;
  std::uint64_t change_interval_collisions = 0;
  std::uint64_t flagged_permitted_ticks = 0;
  std::uint64_t override_ticks = 0;
  double unsafe_proposal_rate = 0.0;
};

struct MetricStats {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 for a single run
};

struct EvalResult {
  std::string name;
  std::string scenario;
  variants::VariantKind kind = variants::VariantKind::backbone;
  std::vector<std::uint64_t> seeds;
  std::vector<RunRow> runs;
  std::map<std::string, MetricStats> aggregate;
};

// Names of the per-run metrics, in report column order.
const std::vector<std::string>& metric_names();
double metric_value(const RunRow& row, const std::string& name);
MetricStats summarize(const std::vector<double>& values);

// Greedy episodes on seeds master + 0 .. n_runs - 1. Greedy selection only
// reads the networks, so the learner comes back unchanged.
EvalResult evaluate(const RunConfig& cfg, Learner* learner, int n_runs);
EvalResult evaluate_checkpoint(const RunConfig& cfg, const nn::Checkpoint& ckpt, int n_runs);

struct CompareRow {
  std::string name;
  variants::VariantKind kind = variants::VariantKind::backbone;
  std::map<std::string, double> means;
  // Percent collision reduction and percent waiting change against each
  // reference; empty when the reference is absent.
  std::optional<double> collision_reduction_vs_backbone_pct;
  std::optional<double> waiting_change_vs_backbone_pct;
  std::optional<double> collision_reduction_vs_fixed_pct;
  std::optional<double> waiting_change_vs_fixed_pct;
};

double percent_reduction(double reference, double value);
double percent_change(double reference, double value);

// All results must share scenario and evaluation seeds.
std::vector<CompareRow> compare(const std::vector<EvalResult>& results);

}  // namespace safelight::harness
