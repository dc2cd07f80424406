#include "acme/cli/app.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>
#include <vector>

#include "acme/cli/commands.hpp"
#include "acme/common/error.hpp"

namespace acme::cli {

namespace fs = std::filesystem;

namespace {

struct Invocation {
  std::string command;
  std::vector<std::string> configs;
  std::vector<std::string> sets;
  std::string out;
  int jobs = 1;
  // Command-line flags mapped onto config keys; path values are made
  // absolute so they stay relative to the working directory.
  std::map<std::string, std::string> overrides;
};

int exit_code(ErrorCode code) {
  return code == ErrorCode::kConfig || code == ErrorCode::kInvalid ? kExitConfig : kExitData;
}

report::Report dispatch(const RunConfig& rc, std::ostream& summary) {
  if (rc.command == "analyze") return run_analyze(rc, summary);
  if (rc.command == "simulate-pretrain") return run_simulate_pretrain(rc, summary);
  if (rc.command == "simulate-eval") return run_simulate_eval(rc, summary);
  return run_diagnose(rc, summary);
}

struct Outcome {
  int status = kExitOk;
  std::string out;
  std::string err;
};

Outcome run_scenario(const Invocation& inv, const std::optional<std::string>& config,
                     const std::optional<fs::path>& out_dir, const char* env_seed) {
  Outcome o;
  std::ostringstream out;
  out << std::setprecision(4);
  try {
    KvConfig kv = config ? KvConfig::load(*config) : KvConfig{};
    for (const auto& s : inv.sets) kv.set_assignment(s);
    for (const auto& [k, v] : inv.overrides) kv.set(k, v);
    RunConfig rc = RunConfig::build(inv.command, std::move(kv), env_seed);
    if (out_dir) rc.output_dir = *out_dir;
    const report::Report rep = dispatch(rc, out);
    report::emit_report(rep, rc.output_dir);
    o.out = inv.command + (config ? " [" + *config + "]" : std::string()) + " -> " + rc.output_dir.string() +
            "\n" + out.str();
  } catch (const Error& e) {
    o.status = exit_code(e.code());
    o.err = "acme-sim: error[" + std::string(error_code_name(e.code())) + "]: " + e.what() + "\n";
  } catch (const std::exception& e) {
    o.status = kExitData;
    o.err = "acme-sim: error[data_error]: " + std::string(e.what()) + "\n";
  }
  return o;
}

std::string absolute(const std::string& p) { return fs::absolute(p).lexically_normal().string(); }

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Trace analytics and simulation for LLM development clusters", "acme-sim"};
  app.require_subcommand(1);
  Invocation inv;

  auto common = [&inv](CLI::App* sub) {
    sub->add_option("--config", inv.configs, "Run config file; several files run as independent scenarios");
    sub->add_option("--set", inv.sets, "Override a config key (key=value)");
    sub->add_option("--out", inv.out, "Output directory (default: output.dir or out/<command>)");
    sub->add_option("--jobs", inv.jobs, "Scenarios to run in parallel")->check(CLI::PositiveNumber);
  };

  std::string trace_path;
  auto* analyze = app.add_subcommand("analyze", "Characterize a job trace");
  common(analyze);
  analyze->add_option("--trace", trace_path, "Trace CSV (overrides trace.path)");

  auto* pretrain = app.add_subcommand("simulate-pretrain", "Checkpointing, failures, scheduling and fault localization");
  common(pretrain);

  std::string datasets;
  int nodes = 0;
  std::string mode;
  auto* evalc = app.add_subcommand("simulate-eval", "Baseline vs decoupled evaluation scheduling");
  common(evalc);
  evalc->add_option("--datasets", datasets, "Dataset priors CSV (overrides eval.datasets)");
  evalc->add_option("--nodes", nodes, "Nodes (overrides eval.nodes)")->check(CLI::PositiveNumber);
  evalc->add_option("--mode", mode, "baseline or decoupled; both when omitted")
      ->check(CLI::IsMember({"baseline", "decoupled"}));

  std::string logfile;
  std::string rules;
  std::string mock;
  auto* diagnose = app.add_subcommand("diagnose", "Find the root cause of a failed job from its log");
  common(diagnose);
  diagnose->add_option("logfile", logfile, "Job log")->required();
  diagnose->add_option("--rules", rules, "Reason rule table (overrides diag.rules)");
  diagnose->add_option("--mock", mock, "Directory of canned agent responses (overrides diag.mock)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  for (auto* sub : {analyze, pretrain, evalc, diagnose}) {
    if (sub->parsed()) inv.command = sub->get_name();
  }
  if (!trace_path.empty()) inv.overrides["trace.path"] = absolute(trace_path);
  if (!datasets.empty()) inv.overrides["eval.datasets"] = absolute(datasets);
  if (nodes > 0) inv.overrides["eval.nodes"] = std::to_string(nodes);
  if (!mode.empty()) inv.overrides["eval.mode"] = mode;
  if (!logfile.empty()) inv.overrides["diag.log"] = absolute(logfile);
  if (!rules.empty()) inv.overrides["diag.rules"] = absolute(rules);
  if (!mock.empty()) inv.overrides["diag.mock"] = absolute(mock);

  const char* env_seed = std::getenv(kSeedEnv);
  std::vector<std::optional<std::string>> scenarios;
  for (const auto& c : inv.configs) scenarios.emplace_back(c);
  if (scenarios.empty()) scenarios.emplace_back(std::nullopt);

  // Several scenarios write to <out>/<config stem>, suffixed on clashes.
  std::vector<std::optional<fs::path>> out_dirs(scenarios.size());
  if (scenarios.size() == 1) {
    if (!inv.out.empty()) out_dirs[0] = fs::path(inv.out);
  } else {
    const fs::path base = inv.out.empty() ? fs::path("out") / inv.command : fs::path(inv.out);
    std::set<std::string> used;
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
      std::string stem = fs::path(*scenarios[i]).stem().string();
      for (int n = 2; used.count(stem) > 0; ++n) stem = fs::path(*scenarios[i]).stem().string() + "-" + std::to_string(n);
      used.insert(stem);
      out_dirs[i] = base / stem;
    }
  }

  std::vector<Outcome> outcomes(scenarios.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < scenarios.size(); i = next++) {
      outcomes[i] = run_scenario(inv, scenarios[i], out_dirs[i], env_seed);
    }
  };
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(inv.jobs), scenarios.size());
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  int status = kExitOk;
  for (const auto& o : outcomes) {
    out << o.out;
    err << o.err;
    status = std::max(status, o.status);
  }
  return status;
}

}  // namespace acme::cli
