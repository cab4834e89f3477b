#include "hida/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace hida {

nlohmann::json VerificationReport::to_json() const {
  nlohmann::json j{{"check", check},   {"function", function_id}, {"grid", grid},
                   {"witness", witness}, {"constants", constants}, {"status", pass ? "pass" : "fail"}};
  j["worst_margin"] = std::isfinite(worst_margin) ? nlohmann::json(worst_margin) : nlohmann::json();
  if (!detail.empty()) j["detail"] = detail;
  return j;
}

void MarginTracker::add(double margin, const nlohmann::json& where) {
  ++count_;
  // NaN counts as a violation.
  if (!(margin >= worst_)) {
    worst_ = std::isnan(margin) ? -std::numeric_limits<double>::infinity() : margin;
    witness_ = where;
  }
}

void sort_reports(std::vector<VerificationReport>& reports) {
  std::stable_sort(reports.begin(), reports.end(), [](const auto& a, const auto& b) {
    return a.check != b.check ? a.check < b.check : a.function_id < b.function_id;
  });
}

std::string summary_table(const std::vector<VerificationReport>& reports) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-30s %-16s %-6s %14s\n", "check", "function", "status", "worst_margin");
  out += line;
  std::size_t failures = 0;
  for (const auto& r : reports) {
    std::snprintf(line, sizeof line, "%-30s %-16s %-6s %14.6g\n", r.check.c_str(), r.function_id.c_str(),
                  r.pass ? "pass" : "FAIL", r.worst_margin);
    out += line;
    failures += r.pass ? 0 : 1;
  }
  std::snprintf(line, sizeof line, "%zu checks, %zu failed\n", reports.size(), failures);
  out += line;
  return out;
}

}  // namespace hida
