#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hida/errors.hpp"
#include "hida/numerics.hpp"
#include "hida/runner.hpp"

using nlohmann::json;

namespace {

struct Global {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  unsigned jobs = 1;
};

// Flags shared by the single-job subcommands; everything else goes through --set.
struct JobFlags {
  std::vector<std::string> functions;
  std::vector<std::string> specs;  // ID=JSON
  std::string check, op;
  std::optional<int> n_max;
  std::vector<std::string> sets;   // key=JSON-or-string
};

json parse_value(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    return text;
  }
}

hida::Manifest single_job_manifest(const std::string& kind, const JobFlags& f) {
  json functions = json::object();
  for (const auto& spec : hida::catalog()) functions[spec.id] = hida::to_json(spec);
  for (const auto& s : f.specs) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw hida::SchemaError("--spec expects ID=JSON, got \"" + s + "\"");
    functions[s.substr(0, eq)] = parse_value(s.substr(eq + 1));
  }
  json job{{"kind", kind}, {"name", kind}};
  if (f.functions.size() == 1) job["function"] = f.functions.front();
  if (f.functions.size() > 1) job["functions"] = f.functions;
  if (!f.check.empty()) job["check"] = f.check;
  if (!f.op.empty()) job["op"] = f.op;
  if (f.n_max) job["n_max"] = *f.n_max;
  for (const auto& s : f.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw hida::SchemaError("--set expects KEY=VALUE, got \"" + s + "\"");
    job[s.substr(0, eq)] = parse_value(s.substr(eq + 1));
  }
  return hida::Manifest::parse({{"schema_version", hida::kManifestSchemaVersion},
                                {"functions", functions},
                                {"jobs", json::array({job})}});
}

hida::RunOptions run_options(const Global& g) {
  hida::RunOptions o;
  if (!g.out.empty()) o.out_dir = g.out;
  o.seed = g.seed;
  o.tol = g.tol;
  o.jobs = g.jobs;
  return o;
}

int report(const hida::RunSummary& s, bool print_results) {
  if (print_results)
    for (const auto& j : s.jobs) std::cout << j.to_json().dump(2) << "\n";
  std::cerr << s.text();
  return s.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Growth functions, Legendre transforms and white-noise test-space checks"};
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  app.add_option("--config", g.config, "Run manifest (JSON)");
  app.add_option("--out", g.out, "Directory for reports and tables");
  app.add_option("--seed", g.seed, "Seed for stochastic jobs that declare none");
  app.add_option("--tol", g.tol, "Legendre minimiser tolerance")->check(CLI::PositiveNumber);
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::Range(1u, 1024u));

  const std::vector<std::pair<std::string, std::string>> kinds{
      {"eval", "log u(r) on a grid, or Mittag-Leffler values via --set mittag_leffler={...}"},
      {"legendre", "Legendre table for t = 0..n_max (or --set t=[...]); --set csv=FILE writes CSV"},
      {"lfn", "L-function values"},
      {"conditions", "grid certificates for U0-U3, C+1/2, C+log"},
      {"verify", "inequality checks (--check suite|equivalence|chain_order|bidual|...)"},
      {"fock", "sequence-space norms, Hermite surrogate, Cauchy bound (--op ...)"},
      {"measures", "Fernique, Poisson and grey-noise integrability (--op ...)"}};
  std::vector<JobFlags> flags(kinds.size());
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    auto* sub = app.add_subcommand(kinds[i].first, kinds[i].second);
    auto& f = flags[i];
    sub->add_option("--function,-f", f.functions, "Function id (catalog or --spec); repeatable");
    sub->add_option("--spec", f.specs, "Declare a function: ID=JSON");
    sub->add_option("--check", f.check, "Check name (verify)");
    sub->add_option("--op", f.op, "Operation (fock, measures)");
    sub->add_option("--n-max", f.n_max, "Table length");
    sub->add_option("--set", f.sets, "Job field KEY=VALUE (VALUE parsed as JSON when possible)");
    subs.push_back(sub);
  }
  auto* suite = app.add_subcommand("suite", "Run every job of the --config manifest");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    hida::set_default_jobs(g.jobs);
    const hida::RunOptions opt = run_options(g);
    if (suite->parsed()) {
      if (g.config.empty()) throw hida::SchemaError("suite: --config is required");
      return report(hida::run(hida::Manifest::load(g.config), opt), false);
    }
    for (std::size_t i = 0; i < subs.size(); ++i) {
      if (!subs[i]->parsed()) continue;
      if (!g.config.empty()) {
        hida::RunOptions only = opt;
        only.only_kind = kinds[i].first;
        return report(hida::run(hida::Manifest::load(g.config), only), g.out.empty());
      }
      return report(hida::run(single_job_manifest(kinds[i].first, flags[i]), opt), true);
    }
  } catch (const hida::SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
