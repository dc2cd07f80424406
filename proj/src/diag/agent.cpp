#include "acme/diag/agent.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "acme/common/digest.hpp"
#include "acme/common/error.hpp"
#include "acme/common/text.hpp"

namespace acme::diag {

nlohmann::ordered_json AgentRequest::to_json() const {
  nlohmann::ordered_json j;
  j["prompt"] = prompt;
  j["k"] = k;
  j["temperature"] = temperature;
  return j;
}

AgentResponse AgentResponse::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("completions") || !j["completions"].is_array()) {
    throw Error(ErrorCode::kAgent, "agent response lacks a completions array");
  }
  AgentResponse r;
  for (const auto& c : j["completions"]) r.completions.push_back(c);
  return r;
}

std::string prompt_digest(const std::string& prompt) { return fnv1a_hex(prompt); }

AgentResponse MockAgentClient::do_complete(const AgentRequest& request) {
  const auto path = dir_ / (prompt_digest(request.prompt) + ".json");
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kAgent, "no canned response " + path.string());
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::kAgent, "malformed canned response " + path.string());
  return AgentResponse::from_json(j);
}

std::string filter_prompt(const std::vector<std::string>& segment) {
  std::string p =
      "task: filter-rules\n"
      "Propose ECMAScript regular expressions matching routine lines of this log segment. "
      "Never match error lines. Answer {\"rules\": [...]}.\n"
      "segment:\n";
  for (const auto& line : segment) {
    p += line;
    p += '\n';
  }
  return p;
}

ProposalOutcome propose_rules(const std::vector<std::string>& segment, AgentClient& client, int k,
                              const ValidationCorpus& corpus, const std::string& run_id,
                              const ReasonRuleTable* guard, double temperature) {
  if (k < 1 || k % 2 == 0) throw Error(ErrorCode::kInvalid, "sample count k must be odd and >= 1");
  ProposalOutcome out;
  AgentResponse response;
  try {
    response = client.complete({filter_prompt(segment), k, temperature});
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kAgent) throw;
    out.client_failed = true;
    return out;
  }

  // Votes per distinct pattern, one per completion, in first-seen order.
  std::vector<std::string> order;
  std::map<std::string, int> votes;
  for (const auto& c : response.completions) {
    if (!c.is_object() || !c.contains("rules") || !c["rules"].is_array()) continue;
    std::set<std::string> seen;
    for (const auto& r : c["rules"]) {
      if (!r.is_string()) continue;
      const std::string pattern = r.get<std::string>();
      if (!seen.insert(pattern).second) continue;
      if (votes[pattern]++ == 0) order.push_back(pattern);
    }
  }

  std::vector<std::size_t> guarded;
  if (guard) {
    for (std::size_t i = 0; i < segment.size(); ++i) {
      for (const auto& rule : guard->rules()) {
        if (rule.matches(segment[i])) {
          guarded.push_back(i);
          break;
        }
      }
    }
  }

  for (const auto& pattern : order) {
    if (2 * votes[pattern] <= k) {
      out.rejected.push_back({0, pattern, "no majority"});
      continue;
    }
    try {
      FilterRule rule(pattern, Provenance::kAgentLearned, run_id);
      if (const std::string* hit = corpus.first_match(rule.regex())) {
        out.rejected.push_back({0, pattern, "matches error line: " + *hit});
        continue;
      }
      bool unsafe = false;
      for (std::size_t i : guarded) {
        if (rule.matches(segment[i])) {
          out.rejected.push_back({0, pattern, "matches diagnosable line: " + segment[i]});
          unsafe = true;
          break;
        }
      }
      if (!unsafe) out.accepted.push_back(std::move(rule));
    } catch (const Error& e) {
      out.rejected.push_back({0, pattern, e.what()});
    }
  }
  return out;
}

std::string diagnosis_prompt(
    const std::vector<std::string>& kept_lines,
    const std::vector<std::pair<const EmbeddingIndex::Document*, double>>& precedents) {
  std::string p =
      "task: diagnose\n"
      "Identify the root cause. Answer {\"reason\", \"category\", \"origin\", \"recoverable\", "
      "\"mitigation\", \"evidence\": [line numbers], \"rule\": regex}.\n";
  for (const auto& [doc, sim] : precedents) {
    p += "precedent " + text::format_double(sim) + ": " + doc->result.reason + " (" +
         std::string(to_string(doc->result.category)) + ")\n";
  }
  p += "log:\n";
  for (std::size_t i = 0; i < kept_lines.size(); ++i) {
    p += std::to_string(i) + ": " + kept_lines[i] + '\n';
  }
  return p;
}

namespace {

std::optional<std::string> string_field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) return std::nullopt;
  return j[key].get<std::string>();
}

// nullopt when the completion does not describe a usable diagnosis.
std::optional<AgentDiagnosis> parse_completion(const nlohmann::json& c,
                                               const std::vector<std::string>& lines,
                                               const std::string& run_id) {
  if (!c.is_object()) return std::nullopt;
  const auto reason = string_field(c, "reason");
  const auto category_text = string_field(c, "category");
  if (!reason || text::trim(*reason).empty() || *reason == kUnknownReason || !category_text) {
    return std::nullopt;
  }
  const auto category = parse_category(*category_text);
  if (!category || *category == Category::kUnknown) return std::nullopt;

  AgentDiagnosis out;
  DiagnosisResult& r = out.result;
  r.reason = std::string(text::trim(*reason));
  r.category = *category;
  const ReasonInfo* info = find_reason(r.reason);
  r.origin = info ? info->origin : Origin::kUnknown;
  r.recoverable = info ? info->recoverable : Recoverable::kUnknown;
  if (const auto o = string_field(c, "origin")) {
    if (const auto v = parse_origin(*o)) r.origin = *v;
  }
  if (c.contains("recoverable")) {
    const auto& v = c["recoverable"];
    if (v.is_boolean()) {
      r.recoverable = v.get<bool>() ? Recoverable::kYes : Recoverable::kNo;
    } else if (v.is_string()) {
      if (const auto p = parse_recoverable(v.get<std::string>())) r.recoverable = *p;
    }
  }
  r.mitigation = string_field(c, "mitigation").value_or("");

  if (const auto pattern = string_field(c, "rule"); pattern && !pattern->empty()) {
    try {
      ReasonRule rule = ReasonRule::make(*pattern, r.reason, r.category, r.origin, r.recoverable,
                                         category_band(r.category), r.mitigation,
                                         Provenance::kAgentLearned, run_id);
      bool hits = false;
      for (const auto& line : lines) hits = hits || rule.matches(line);
      if (hits) out.learned_rule = std::move(rule);
    } catch (const Error&) {
      // An unusable rule still leaves the diagnosis itself intact.
    }
  }

  if (c.contains("evidence") && c["evidence"].is_array()) {
    for (const auto& e : c["evidence"]) {
      if (e.is_number_integer() && e.get<long long>() >= 0 &&
          static_cast<std::size_t>(e.get<long long>()) < lines.size()) {
        r.evidence_lines.push_back(static_cast<std::size_t>(e.get<long long>()));
      }
    }
  }
  if (r.evidence_lines.empty() && out.learned_rule) {
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (out.learned_rule->matches(lines[i])) r.evidence_lines.push_back(i);
    }
  }
  if (r.evidence_lines.empty()) return std::nullopt;
  return out;
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string s;
  for (const auto& l : lines) {
    s += l;
    s += '\n';
  }
  return s;
}

}  // namespace

AgentDiagnosis agent_diagnose(const std::vector<std::string>& kept_lines,
                              const std::vector<Match>& retrieved, AgentClient& client,
                              ReasonRuleTable& table, EmbeddingIndex& index,
                              const std::string& run_id) {
  std::vector<std::pair<const EmbeddingIndex::Document*, double>> precedents;
  for (const auto& m : retrieved) {
    if (m.document < index.size()) precedents.emplace_back(&index.documents()[m.document], m.similarity);
  }
  AgentDiagnosis out;
  std::optional<AgentDiagnosis> parsed;
  try {
    const AgentResponse response = client.complete({diagnosis_prompt(kept_lines, precedents), 1, 0.0});
    if (!response.completions.empty()) parsed = parse_completion(response.completions.front(), kept_lines, run_id);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kAgent) throw;
  }
  if (!parsed) return out;
  out = std::move(*parsed);
  if (out.learned_rule) table.append(*out.learned_rule);
  index.add(join_lines(kept_lines), out.result);
  return out;
}

}  // namespace acme::diag
