#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "safelight/harness/experiment.hpp"

namespace safelight::harness {

inline constexpr const char* kCurveSchema = "safelight-curve/1";
inline constexpr const char* kEvalSchema = "safelight-eval/1";
inline constexpr const char* kCompareSchema = "safelight-compare/1";

// Shortest decimal form that parses back to the same double.
std::string format_number(double v);

std::string curve_csv(const std::vector<CurveRow>& rows);
std::string eval_runs_csv(const EvalResult& r);
nlohmann::json eval_json(const EvalResult& r);
std::string compare_csv(const std::vector<CompareRow>& rows);
std::string compare_table(const std::vector<CompareRow>& rows);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace safelight::harness
