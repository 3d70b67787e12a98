#include "safelight/harness/experiment.hpp"

#include <cmath>
#include <limits>

#include "safelight/common/error.hpp"

namespace safelight::harness {

namespace {

CurveRow curve_row(const EpisodeOutcome& o, bool evaluation_only) {
  CurveRow r;
  r.episode = o.report.episode;
  r.seed = o.report.seed;
  r.evaluation_only = evaluation_only;
  r.avg_waiting_s = o.report.avg_waiting_s;
  r.throughput = o.report.throughput;
  r.mean_stopped = o.report.mean_stopped;
  r.collisions = o.report.collisions;
  r.cumulative_reward = o.cumulative_reward;
  r.epsilon = o.epsilon;
  r.intervention_rate = o.report.intervention_rate;
  r.batches = o.learn.batches;
  r.safe_batches = o.learn.safe_batches;
  r.max_safe_batch_kl = o.learn.max_safe_batch_kl;
  r.mean_kl = o.learn.batches ? o.learn.kl_sum / static_cast<double>(o.learn.batches) : 0.0;
  return r;
}

RunRow run_row(const EpisodeOutcome& o) {
  RunRow r;
  r.report = o.report;
  r.change_interval_collisions = o.change_interval_collisions;
  r.flagged_permitted_ticks = o.flagged_permitted_ticks;
  r.override_ticks = o.override_ticks;
  r.unsafe_proposal_rate =
      o.decisions ? static_cast<double>(o.unsafe_proposals) / static_cast<double>(o.decisions) : 0.0;
  return r;
}

}  // namespace

TrainResult train(const RunConfig& cfg, const ProgressFn& progress) {
  cfg.validate();
  TrainResult out;
  out.learner = make_learner(cfg);
  if (!out.learner) {
    for (int i = 0; i < cfg.eval_runs; ++i) {
      const auto o = run_episode(cfg, nullptr, eval_seed(cfg, i), i, {});
      out.curve.push_back(curve_row(o, true));
      if (progress) progress(out.curve.back());
    }
  } else {
    for (int ep = 0; ep < cfg.train_episodes; ++ep) {
      EpisodeOptions opt;
      opt.train = true;
      opt.explore = true;
      const auto o = run_episode(cfg, out.learner.get(), train_seed(cfg, ep), ep, opt);
      out.curve.push_back(curve_row(o, false));
      if (progress) progress(out.curve.back());
    }
    out.learner->store(out.checkpoint);
  }
  out.checkpoint.metadata["config"] = to_json(cfg);
  out.checkpoint.metadata["config"].erase("scenario_inline");
  out.checkpoint.metadata["scenario"] = cfg.scenario.name;
  return out;
}

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names{
      "avg_waiting_s",          "throughput",     "mean_stopped",        "collisions",
      "change_interval_collisions", "intervention_rate", "override_ticks", "flagged_permitted_ticks",
      "unsafe_proposal_rate"};
  return names;
}

double metric_value(const RunRow& r, const std::string& name) {
  if (name == "avg_waiting_s") return r.report.avg_waiting_s;
  if (name == "throughput") return r.report.throughput;
  if (name == "mean_stopped") return r.report.mean_stopped;
  if (name == "collisions") return r.report.collisions;
  if (name == "change_interval_collisions") return static_cast<double>(r.change_interval_collisions);
  if (name == "intervention_rate") return r.report.intervention_rate;
  if (name == "override_ticks") return static_cast<double>(r.override_ticks);
  if (name == "flagged_permitted_ticks") return static_cast<double>(r.flagged_permitted_ticks);
  if (name == "unsafe_proposal_rate") return r.unsafe_proposal_rate;
  throw Error("unknown metric " + name);
}

MetricStats summarize(const std::vector<double>& values) {
  MetricStats s;
  if (values.empty()) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

EvalResult evaluate(const RunConfig& cfg, Learner* learner, int n_runs) {
  cfg.validate();
  if (n_runs < 1) throw ConfigError("eval_runs", "must be >= 1");
  EvalResult out;
  out.name = cfg.name;
  out.scenario = cfg.scenario.name;
  out.kind = cfg.variant.kind;
  for (int i = 0; i < n_runs; ++i) {
    const auto seed = eval_seed(cfg, i);
    out.seeds.push_back(seed);
    out.runs.push_back(run_row(run_episode(cfg, learner, seed, i, {})));
  }
  for (const auto& m : metric_names()) {
    std::vector<double> v;
    for (const auto& r : out.runs) v.push_back(metric_value(r, m));
    out.aggregate[m] = summarize(v);
  }
  return out;
}

EvalResult evaluate_checkpoint(const RunConfig& cfg, const nn::Checkpoint& ckpt, int n_runs) {
  auto learner = make_learner(cfg);
  if (learner) learner->restore(ckpt);
  return evaluate(cfg, learner.get(), n_runs);
}

double percent_reduction(double reference, double value) {
  if (reference == 0.0) return value == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
  return 100.0 * (reference - value) / reference;
}

double percent_change(double reference, double value) {
  if (reference == 0.0) return value == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return 100.0 * (value - reference) / reference;
}

std::vector<CompareRow> compare(const std::vector<EvalResult>& results) {
  if (results.empty()) return {};
  for (const auto& r : results) {
    if (r.scenario != results.front().scenario)
      throw ConfigError("compare", "scenario mismatch: " + r.scenario + " vs " + results.front().scenario);
    if (r.seeds != results.front().seeds) throw ConfigError("compare", "evaluation seeds differ for " + r.name);
  }
  const EvalResult* backbone = nullptr;
  const EvalResult* fixed = nullptr;
  for (const auto& r : results) {
    if (!backbone && r.kind == variants::VariantKind::backbone) backbone = &r;
    if (!fixed && r.kind == variants::VariantKind::fixed_time) fixed = &r;
  }
  std::vector<CompareRow> rows;
  for (const auto& r : results) {
    CompareRow row;
    row.name = r.name;
    row.kind = r.kind;
    for (const auto& [k, s] : r.aggregate) row.means[k] = s.mean;
    const double c = r.aggregate.at("collisions").mean;
    const double w = r.aggregate.at("avg_waiting_s").mean;
    if (backbone) {
      row.collision_reduction_vs_backbone_pct = percent_reduction(backbone->aggregate.at("collisions").mean, c);
      row.waiting_change_vs_backbone_pct = percent_change(backbone->aggregate.at("avg_waiting_s").mean, w);
    }
    if (fixed) {
      row.collision_reduction_vs_fixed_pct = percent_reduction(fixed->aggregate.at("collisions").mean, c);
      row.waiting_change_vs_fixed_pct = percent_change(fixed->aggregate.at("avg_waiting_s").mean, w);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace safelight::harness
