#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

#include "acme/cli/commands.hpp"
#include "acme/common/error.hpp"
#include "acme/common/text.hpp"
#include "acme/diag/agent.hpp"
#include "acme/diag/pipeline.hpp"
#include "acme/report/serialize.hpp"

namespace acme::cli {

namespace {

report::Json rejects_json(const std::vector<diag::RuleReject>& rejects) {
  report::Json a = report::Json::array();
  for (const auto& r : rejects) {
    report::Json j;
    j["line"] = r.line;
    j["pattern"] = r.pattern;
    j["reason"] = r.reason;
    a.push_back(j);
  }
  return a;
}

}  // namespace

report::Report run_diagnose(const RunConfig& rc, std::ostream& summary) {
  const auto log_path = rc.existing_path("diag.log");
  if (!log_path) throw Error(ErrorCode::kConfig, "diagnose needs a log file");
  std::ifstream in(*log_path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kData, "cannot read " + log_path->string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string log_text = buf.str();

  diag::ValidationCorpus corpus;
  if (const auto p = rc.existing_path("diag.corpus")) corpus = diag::ValidationCorpus::load(*p);
  std::vector<diag::FilterRule> filters = diag::default_filter_rules();
  std::vector<diag::RuleReject> filter_rejects;
  if (const auto p = rc.existing_path("diag.filters")) {
    auto file = diag::FilterRuleFile::load(*p, &corpus);
    filters = std::move(file.rules);
    filter_rejects = std::move(file.rejected);
  }
  diag::ReasonRuleTable rules = diag::ReasonRuleTable::defaults();
  if (const auto p = rc.existing_path("diag.rules")) rules = diag::ReasonRuleTable::load(*p);
  const std::size_t table_size = rules.size();
  const std::vector<diag::RuleReject> rule_rejects = rules.rejected();

  std::unique_ptr<diag::MockAgentClient> client;
  if (const auto p = rc.existing_path("diag.mock")) client = std::make_unique<diag::MockAgentClient>(*p);

  diag::DiagnoserOptions options;
  options.k = static_cast<int>(rc.kv.get_int("diag.k", options.k));
  options.temperature = rc.kv.get_double("diag.temperature", options.temperature);
  options.retrieve_k = static_cast<std::size_t>(rc.kv.get_int("diag.retrieve_k", 3));
  options.propose_min_lines = static_cast<std::size_t>(rc.kv.get_int("diag.propose_min_lines", 64));
  if (options.k < 1 || options.k % 2 == 0) throw Error(ErrorCode::kConfig, "diag.k must be a positive odd number");

  const auto key = diag::TaskKey::from_job(rc.kv.get_string("diag.job", log_path->stem().string()),
                                           rc.kv.get_string("diag.framework_version", ""));
  diag::Diagnoser diagnoser(std::move(filters), std::move(rules), std::move(corpus), client.get(), options);
  const std::string run_id = rc.kv.get_string("diag.run_id", "cli");
  const auto result = diagnoser.diagnose(log_text, key, run_id);

  report::Report rep;
  rep.command = "diagnose";
  rep.seed = rc.seed;
  rep.config = rc.recorded();
  rep.results["diagnosis"] = report::encode(result);
  report::Json learned = report::Json::array();
  for (std::size_t i = table_size; i < diagnoser.rules().rules().size(); ++i) {
    const auto& r = diagnoser.rules().rules()[i];
    report::Json j;
    j["pattern"] = r.pattern;
    j["reason"] = r.reason;
    j["category"] = diag::to_string(r.category);
    learned.push_back(j);
  }
  rep.results["learned_reason_rules"] = learned;
  report::Json learned_filters = report::Json::array();
  for (const auto& f : diagnoser.learned_filters(key)) learned_filters.push_back(f.pattern());
  rep.results["learned_filter_rules"] = learned_filters;
  rep.results["rejected_reason_rules"] = rejects_json(rule_rejects);
  rep.results["rejected_filter_rules"] = rejects_json(filter_rejects);

  const auto lines = diag::split_lines(log_text);
  report::Table evidence{{"line", "text"}, {}};
  for (const auto i : result.result.evidence_lines) {
    evidence.rows.push_back({std::to_string(i + 1), i < lines.size() ? lines[i] : std::string()});
  }
  rep.tables["evidence"] = std::move(evidence);

  summary << "  reason: " << result.result.reason << " (" << diag::to_string(result.result.category)
          << ", origin " << diag::to_string(result.result.origin) << ", recoverable "
          << diag::to_string(result.result.recoverable) << ") via " << result.path << "\n";
  summary << "  kept " << result.kept_lines << " of " << result.total_lines << " lines, " << result.client_calls
          << " agent calls\n";
  return rep;
}

}  // namespace acme::cli
