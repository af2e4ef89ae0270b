#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "clcons/analysis.hpp"

namespace clcons {

inline constexpr const char* kVersion = "clcons 1.0.0";

nlohmann::json scaling_report_to_json(const ScalingReport& report);

/// Fixed plot-ready columns: epsilon,value,bound,ratio (bound/ratio empty
/// when the quantity has no bound estimate).
std::string scaling_report_to_csv(const ScalingReport& report);

void write_text_file(const std::string& path, const std::string& content, bool force = false);

}  // namespace clcons
