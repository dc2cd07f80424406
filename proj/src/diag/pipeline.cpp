#include "acme/diag/pipeline.hpp"

#include <cctype>

namespace acme::diag {

TaskKey TaskKey::from_job(std::string_view job_name, std::string framework_version) {
  // Strip trailing "-<digits>", "_<digits>" or bare digits, e.g. "llm-7b-run-12" -> "llm-7b-run".
  std::string_view s = job_name;
  for (;;) {
    std::size_t end = s.size();
    while (end > 0 && std::isdigit(static_cast<unsigned char>(s[end - 1]))) --end;
    if (end == s.size()) break;
    if (end > 0 && (s[end - 1] == '-' || s[end - 1] == '_')) --end;
    if (end == 0) break;
    s = s.substr(0, end);
  }
  return {std::string(s), std::move(framework_version)};
}

Diagnoser::Diagnoser(std::vector<FilterRule> filters, ReasonRuleTable rules,
                     ValidationCorpus corpus, AgentClient* client, DiagnoserOptions options)
    : filters_(std::move(filters)),
      rules_(std::move(rules)),
      corpus_(std::move(corpus)),
      client_(client),
      options_(options) {}

const std::vector<FilterRule>& Diagnoser::learned_filters(const TaskKey& key) const {
  static const std::vector<FilterRule> kNone;
  const auto it = learned_.find(key);
  return it == learned_.end() ? kNone : it->second;
}

DiagnosisReport Diagnoser::diagnose(std::string_view log_text, const TaskKey& key,
                                    const std::string& run_id) {
  DiagnosisReport report;
  const std::size_t calls_before = client_ ? client_->calls() : 0;
  const std::vector<std::string> lines = split_lines(log_text);
  report.total_lines = lines.size();

  auto& learned = learned_[key];
  const bool may_propose = client_ && !proposed_[key];
  std::vector<std::size_t> kept_index;
  for (const Segment& seg : segment_lines(lines, options_.segment_bytes)) {
    std::vector<std::string> part(lines.begin() + static_cast<std::ptrdiff_t>(seg.begin),
                                  lines.begin() + static_cast<std::ptrdiff_t>(seg.end));
    std::vector<FilterRule> active = filters_;
    active.insert(active.end(), learned.begin(), learned.end());
    FilterResult fr = apply_filters(part, active);

    if (may_propose && fr.kept_lines.size() >= options_.propose_min_lines) {
      ProposalOutcome p = propose_rules(fr.kept_lines, *client_, options_.k, corpus_, run_id,
                                        &rules_, options_.temperature);
      if (!p.accepted.empty()) {
        report.filter_rules_learned += p.accepted.size();
        learned.insert(learned.end(), p.accepted.begin(), p.accepted.end());
        active.insert(active.end(), p.accepted.begin(), p.accepted.end());
        fr = apply_filters(part, active);
      }
    }
    for (std::size_t r = 0; r < fr.hits.size(); ++r) {
      if (r < filters_.size()) {
        filters_[r].add_hits(fr.hits[r]);
      } else if (r - filters_.size() < learned.size()) {
        learned[r - filters_.size()].add_hits(fr.hits[r]);
      }
    }
    for (std::size_t i = 0; i < fr.kept_lines.size(); ++i) {
      report.kept.push_back(std::move(fr.kept_lines[i]));
      kept_index.push_back(seg.begin + fr.kept_index[i]);
    }
  }
  if (client_) proposed_[key] = true;
  report.kept_lines = report.kept.size();

  DiagnosisResult result;
  if (auto r = rule_diagnose(report.kept, rules_)) {
    result = std::move(*r);
    report.path = "rule";
  } else if (client_) {
    std::string joined;
    for (const auto& l : report.kept) joined += l + '\n';
    std::vector<Match> retrieved;
    if (!index_.empty()) retrieved = retrieve_similar(joined, index_, options_.retrieve_k);
    AgentDiagnosis a = agent_diagnose(report.kept, retrieved, *client_, rules_, index_, run_id);
    result = std::move(a.result);
    report.reason_rule_learned = a.learned_rule.has_value();
    report.path = result.known() ? "agent" : "none";
  } else {
    report.path = "none";
  }
  for (auto& e : result.evidence_lines) e = kept_index[e];
  report.result = std::move(result);
  report.client_calls = client_ ? client_->calls() - calls_before : 0;
  return report;
}

}  // namespace acme::diag
