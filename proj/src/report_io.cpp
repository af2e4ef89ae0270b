#include "clcons/report_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace clcons {

using nlohmann::json;

nlohmann::json scaling_report_to_json(const ScalingReport& report) {
  json j;
  j["quantity"] = report.quantity_name;
  j["region"] = report.region_description;
  json params;
  if (report.p > 0.0) params["p"] = report.p;
  if (report.q > 0.0) params["q"] = report.q;
  if (report.s > 0.0) params["s"] = report.s;
  if (report.gamma > 0.0) params["gamma"] = report.gamma;
  if (!report.kernel_profile.empty()) params["kernel_profile"] = report.kernel_profile;
  j["parameters"] = params;
  json pairs = json::array();
  for (const auto& pt : report.pairs) {
    json row;
    row["epsilon"] = pt.epsilon;
    row["value"] = pt.value;
    if (pt.has_bound) {
      row["bound"] = pt.bound;
      row["ratio"] = pt.ratio;
    }
    pairs.push_back(row);
  }
  j["pairs"] = pairs;
  if (report.fit.valid) {
    j["fit"] = {{"slope", report.fit.slope},
                {"intercept", report.fit.intercept},
                {"r_squared", report.fit.r_squared},
                {"points_used", report.fit.points_used}};
  }
  if (report.ratio_fit.valid) {
    j["ratio_fit"] = {{"slope", report.ratio_fit.slope},
                      {"intercept", report.ratio_fit.intercept},
                      {"r_squared", report.ratio_fit.r_squared}};
  }
  j["degenerate"] = report.degenerate;
  j["pass"] = report.pass;
  if (!report.note.empty()) j["note"] = report.note;
  return j;
}

std::string scaling_report_to_csv(const ScalingReport& report) {
  std::ostringstream os;
  os.precision(17);
  os << "epsilon,value,bound,ratio\n";
  for (const auto& pt : report.pairs) {
    os << pt.epsilon << "," << pt.value << ",";
    if (pt.has_bound) {
      os << pt.bound << "," << pt.ratio;
    } else {
      os << ",";
    }
    os << "\n";
  }
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content, bool force) {
  if (!force && std::filesystem::exists(path)) {
    throw std::invalid_argument("refusing to overwrite '" + path + "' without --force");
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::invalid_argument("cannot open '" + path + "' for writing");
  out << content;
}

}  // namespace clcons
