#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "json.hpp"

namespace hida {

/// Comparisons are made in log-domain; a check passes iff its worst margin
/// (min of rhs - lhs) is at least -kLogSlack.
inline constexpr double kLogSlack = 1e-9;

struct VerificationReport {
  std::string check;
  std::string function_id;
  nlohmann::json grid = nlohmann::json::object();
  double worst_margin = 0.0;
  nlohmann::json witness = nlohmann::json::object();
  nlohmann::json constants = nlohmann::json::object();
  bool pass = false;
  std::string detail;

  nlohmann::json to_json() const;
};

/// Running minimum of margins with the point that produced it.
class MarginTracker {
 public:
  void add(double margin, const nlohmann::json& where);
  /// As add(), building the witness only when it becomes the worst.
  template <class Where>
  void add_lazy(double margin, Where&& where) {
    ++count_;
    if (!(margin >= worst_)) {
      worst_ = std::isnan(margin) ? -std::numeric_limits<double>::infinity() : margin;
      witness_ = where();
    }
  }
  double worst() const { return worst_; }
  const nlohmann::json& witness() const { return witness_; }
  std::size_t count() const { return count_; }
  bool ok() const { return count_ > 0 && worst_ >= -kLogSlack; }

 private:
  double worst_ = std::numeric_limits<double>::infinity();
  nlohmann::json witness_ = nlohmann::json::object();
  std::size_t count_ = 0;
};

/// Stable order for aggregation: by check id, then function id.
void sort_reports(std::vector<VerificationReport>& reports);

/// Fixed-width text table, one line per report.
std::string summary_table(const std::vector<VerificationReport>& reports);

}  // namespace hida
