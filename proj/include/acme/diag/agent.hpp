#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "acme/diag/diagnosis_result.hpp"
#include "acme/diag/embedding.hpp"
#include "acme/diag/filter.hpp"
#include "acme/diag/reason_rules.hpp"

namespace acme::diag {

struct AgentRequest {
  std::string prompt;
  int k = 1;
  double temperature = 0.7;

  nlohmann::ordered_json to_json() const;
};

struct AgentResponse {
  std::vector<nlohmann::json> completions;

  static AgentResponse from_json(const nlohmann::json& j);
};

// Transport-independent agent interface. Implementations throw
// Error(kAgent) when no usable response is available.
class AgentClient {
 public:
  virtual ~AgentClient() = default;
  AgentResponse complete(const AgentRequest& request) {
    ++calls_;
    return do_complete(request);
  }
  std::size_t calls() const { return calls_; }

 protected:
  virtual AgentResponse do_complete(const AgentRequest& request) = 0;

 private:
  std::size_t calls_ = 0;
};

// Key under which a mock response is stored: FNV-1a hex of the prompt.
std::string prompt_digest(const std::string& prompt);

// Serves `<dir>/<prompt_digest>.json`, each holding {"completions": [...]}.
class MockAgentClient : public AgentClient {
 public:
  explicit MockAgentClient(std::filesystem::path dir) : dir_(std::move(dir)) {}
  const std::filesystem::path& dir() const { return dir_; }

 protected:
  AgentResponse do_complete(const AgentRequest& request) override;

 private:
  std::filesystem::path dir_;
};

// Wraps a callable; convenient for tests and in-process transports.
class FunctionAgentClient : public AgentClient {
 public:
  using Fn = std::function<AgentResponse(const AgentRequest&)>;
  explicit FunctionAgentClient(Fn fn) : fn_(std::move(fn)) {}

 protected:
  AgentResponse do_complete(const AgentRequest& request) override { return fn_(request); }

 private:
  Fn fn_;
};

std::string filter_prompt(const std::vector<std::string>& segment);

struct ProposalOutcome {
  std::vector<FilterRule> accepted;
  std::vector<RuleReject> rejected;
  bool client_failed = false;
};

// Each completion is {"rules": ["regex", ...]}. A rule is accepted when a
// strict majority of the k completions propose it, it compiles, and it
// matches no validation line. When `guard` is given, a rule that would drop
// a line of the segment matched by a reason rule is rejected too.
ProposalOutcome propose_rules(const std::vector<std::string>& segment, AgentClient& client, int k,
                              const ValidationCorpus& corpus, const std::string& run_id = {},
                              const ReasonRuleTable* guard = nullptr, double temperature = 0.7);

std::string diagnosis_prompt(const std::vector<std::string>& kept_lines,
                             const std::vector<std::pair<const EmbeddingIndex::Document*, double>>&
                                 precedents);

struct AgentDiagnosis {
  DiagnosisResult result;
  std::optional<ReasonRule> learned_rule;
};

// Completion format: {"reason", "category", "origin", "recoverable",
// "mitigation", "evidence": [line indices], "rule": regex}. Only the first
// completion is used. The learned rule must match a kept line; it is
// appended to `table`, and (log, result) is added to `index`.
AgentDiagnosis agent_diagnose(const std::vector<std::string>& kept_lines,
                              const std::vector<Match>& retrieved, AgentClient& client,
                              ReasonRuleTable& table, EmbeddingIndex& index,
                              const std::string& run_id = {});

}  // namespace acme::diag
