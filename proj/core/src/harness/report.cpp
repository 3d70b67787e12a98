#include "safelight/harness/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "safelight/common/error.hpp"

namespace safelight::harness {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

}  // namespace

std::string curve_csv(const std::vector<CurveRow>& rows) {
  std::ostringstream os;
  os << "# schema=" << kCurveSchema << "\n";
  os << "episode,seed,evaluation_only,avg_waiting_s,throughput,mean_stopped,collisions,cumulative_reward,epsilon,"
        "intervention_rate,batches,safe_batches,max_safe_batch_kl,mean_kl\n";
  for (const auto& r : rows) {
    os << r.episode << ',' << r.seed << ',' << (r.evaluation_only ? 1 : 0) << ',' << format_number(r.avg_waiting_s)
       << ',' << format_number(r.throughput) << ',' << format_number(r.mean_stopped) << ','
       << format_number(r.collisions) << ',' << format_number(r.cumulative_reward) << ','
       << format_number(r.epsilon) << ',' << format_number(r.intervention_rate) << ',' << r.batches << ','
       << r.safe_batches << ',' << format_number(r.max_safe_batch_kl) << ',' << format_number(r.mean_kl) << "\n";
  }
  return os.str();
}

std::string eval_runs_csv(const EvalResult& r) {
  std::ostringstream os;
  os << "# schema=" << kEvalSchema << "\n";
  os << "name,run,seed";
  for (const auto& m : metric_names()) os << ',' << m;
  os << "\n";
  for (std::size_t i = 0; i < r.runs.size(); ++i) {
    os << r.name << ',' << i << ',' << r.seeds[i];
    for (const auto& m : metric_names()) os << ',' << format_number(metric_value(r.runs[i], m));
    os << "\n";
  }
  return os.str();
}

nlohmann::json eval_json(const EvalResult& r) {
  nlohmann::json agg = nlohmann::json::object();
  for (const auto& [k, s] : r.aggregate) agg[k] = {{"mean", s.mean}, {"stddev", s.stddev}};
  return {{"schema", kEvalSchema},
          {"name", r.name},
          {"scenario", r.scenario},
          {"variant", variants::to_string(r.kind)},
          {"runs", r.runs.size()},
          {"seeds", r.seeds},
          {"aggregate", agg}};
}

std::string compare_csv(const std::vector<CompareRow>& rows) {
  std::ostringstream os;
  os << "# schema=" << kCompareSchema << "\n";
  os << "name,variant";
  for (const auto& m : metric_names()) os << ',' << m;
  os << ",collision_reduction_vs_backbone_pct,waiting_change_vs_backbone_pct,collision_reduction_vs_fixed_pct,"
        "waiting_change_vs_fixed_pct\n";
  for (const auto& r : rows) {
    os << r.name << ',' << variants::to_string(r.kind);
    for (const auto& m : metric_names()) os << ',' << format_number(r.means.at(m));
    os << ',' << opt(r.collision_reduction_vs_backbone_pct) << ',' << opt(r.waiting_change_vs_backbone_pct) << ','
       << opt(r.collision_reduction_vs_fixed_pct) << ',' << opt(r.waiting_change_vs_fixed_pct) << "\n";
  }
  return os.str();
}

std::string compare_table(const std::vector<CompareRow>& rows) {
  const std::vector<std::string> head{"method", "wait_s", "thru", "stopped", "coll", "interv",
                                      "dColl%bb", "dWait%bb", "dColl%ft", "dWait%ft"};
  auto fixed = [](double v, int prec) {
    if (!std::isfinite(v)) return format_number(v);
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(prec);
    os << v;
    return os.str();
  };
  auto o = [&](const std::optional<double>& v) { return v ? fixed(*v, 1) : std::string("-"); };
  std::vector<std::vector<std::string>> cells{head};
  for (const auto& r : rows) {
    cells.push_back({r.name, fixed(r.means.at("avg_waiting_s"), 2), fixed(r.means.at("throughput"), 1),
                     fixed(r.means.at("mean_stopped"), 2), fixed(r.means.at("collisions"), 2),
                     fixed(r.means.at("intervention_rate"), 3), o(r.collision_reduction_vs_backbone_pct),
                     o(r.waiting_change_vs_backbone_pct), o(r.collision_reduction_vs_fixed_pct),
                     o(r.waiting_change_vs_fixed_pct)});
  }
  std::vector<std::size_t> width(head.size(), 0);
  for (const auto& row : cells)
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  std::ostringstream os;
  for (const auto& row : cells) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i == 0) {
        os << row[i] << std::string(width[i] - row[i].size(), ' ');
      } else {
        os << "  " << std::string(width[i] - row[i].size(), ' ') << row[i];
      }
    }
    os << "\n";
  }
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

}  // namespace safelight::harness
