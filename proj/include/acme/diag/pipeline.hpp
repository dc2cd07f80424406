#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "acme/diag/agent.hpp"

namespace acme::diag {

// Identifies repeated or similar tasks so their learned filter rules are
// reused. The key is a guess at what "similar" means: job name with trailing
// run counters removed, plus framework version.
struct TaskKey {
  std::string name_prefix;
  std::string framework_version;

  static TaskKey from_job(std::string_view job_name, std::string framework_version = {});
  auto operator<=>(const TaskKey&) const = default;
};

struct DiagnoserOptions {
  int k = 3;
  double temperature = 0.7;
  std::size_t segment_bytes = kSegmentBytes;
  std::size_t retrieve_k = 3;
  // Segments whose filtered residue has at least this many lines are sent
  // to the log agent for new filter rules, once per task key.
  std::size_t propose_min_lines = 64;
};

struct DiagnosisReport {
  DiagnosisResult result;  // evidence_lines index the original log
  std::string path;        // "rule", "agent" or "none"
  std::size_t total_lines = 0;
  std::size_t kept_lines = 0;
  std::vector<std::string> kept;
  std::size_t client_calls = 0;
  std::size_t filter_rules_learned = 0;
  bool reason_rule_learned = false;

  double compression() const {
    return total_lines == 0 ? 0.0 : 1.0 - static_cast<double>(kept_lines) / total_lines;
  }

  friend bool operator==(const DiagnosisReport&, const DiagnosisReport&) = default;
};

// Filter, rule-match, then escalate to the agent. Rule table, index and
// learned filter rules are mutated only by diagnose(), one call at a time.
class Diagnoser {
 public:
  Diagnoser(std::vector<FilterRule> filters, ReasonRuleTable rules, ValidationCorpus corpus,
            AgentClient* client = nullptr, DiagnoserOptions options = {});

  DiagnosisReport diagnose(std::string_view log_text, const TaskKey& key = {},
                           const std::string& run_id = {});

  const std::vector<FilterRule>& shipped_filters() const { return filters_; }
  const std::vector<FilterRule>& learned_filters(const TaskKey& key) const;
  const ReasonRuleTable& rules() const { return rules_; }
  const EmbeddingIndex& index() const { return index_; }

 private:
  std::vector<FilterRule> filters_;
  std::map<TaskKey, std::vector<FilterRule>> learned_;
  std::map<TaskKey, bool> proposed_;
  ReasonRuleTable rules_;
  ValidationCorpus corpus_;
  EmbeddingIndex index_;
  AgentClient* client_;
  DiagnoserOptions options_;
};

}  // namespace acme::diag
