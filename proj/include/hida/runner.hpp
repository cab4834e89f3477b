#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hida/growth.hpp"
#include "hida/legendre.hpp"
#include "hida/report.hpp"
#include "json.hpp"

namespace hida {

inline constexpr int kManifestSchemaVersion = 1;

/// Parsed run manifest: {"schema_version": 1, "seed"?, "functions": {id: spec}, "jobs": [...]}.
struct Manifest {
  std::map<std::string, GrowthFunctionSpec> functions;
  std::vector<nlohmann::json> jobs;
  std::optional<std::uint64_t> seed;

  /// Validates the schema, every function spec and every job's references.
  static Manifest parse(const nlohmann::json& j);
  static Manifest load(const std::filesystem::path& path);
};

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::uint64_t> seed;  // used by jobs that declare none
  std::optional<double> tol;          // Legendre minimiser tolerance
  unsigned jobs = 1;
  std::optional<std::string> only_kind;
};

struct JobOutcome {
  std::size_t index = 0;
  std::string name;
  std::string kind;
  bool ok = false;
  nlohmann::json result;
  std::vector<VerificationReport> reports;
  std::string error;

  nlohmann::json to_json() const;
};

struct RunSummary {
  std::vector<JobOutcome> jobs;
  std::vector<std::string> warnings;

  int exit_code() const;  // 0 all passed, 1 otherwise
  nlohmann::json to_json() const;
  std::string text() const;
};

/// Runs one job object. Schema problems throw SchemaError; numerical failures
/// are recorded in the outcome.
JobOutcome run_job(const nlohmann::json& job, std::size_t index, const Manifest& m, const RunOptions& opt);

/// Runs every job (or those of opt.only_kind), writing per-job JSON files and
/// summary.{json,txt} into opt.out_dir when set.
RunSummary run(const Manifest& m, const RunOptions& opt);

/// CSV "t,log_ell,r_star" for t = 0..n_max.
void emit_legendre_table(const GrowthFunctionSpec& spec, int n_max, const std::filesystem::path& path,
                         const LegendreOptions& opt = {});

/// Writes text, creating parent directories; throws std::runtime_error on failure.
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace hida
