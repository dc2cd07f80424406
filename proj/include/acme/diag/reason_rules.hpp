#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "acme/diag/diagnosis_result.hpp"
#include "acme/diag/filter.hpp"

namespace acme::diag {

// Category, origin and recoverability of a failure reason.
struct ReasonInfo {
  std::string_view name;
  Category category;
  Origin origin;
  Recoverable recoverable;
};

// All 29 reasons of the production failure taxonomy, in root-cause priority
// order (first dominates).
const std::vector<ReasonInfo>& reason_taxonomy();
const ReasonInfo* find_reason(std::string_view name);

// Priority bands: any Infrastructure rule outranks any Framework rule, which
// outranks any Script rule.
inline constexpr int kInfrastructureBand = 300;
inline constexpr int kFrameworkBand = 200;
inline constexpr int kScriptBand = 100;
int category_band(Category c);

struct ReasonRule {
  std::string pattern;
  std::string reason;
  Category category = Category::kUnknown;
  Origin origin = Origin::kUnknown;
  Recoverable recoverable = Recoverable::kUnknown;
  int priority = 0;  // higher wins
  std::string mitigation;
  Provenance provenance = Provenance::kShipped;
  std::string run_id;

  bool matches(std::string_view line) const;
  const std::regex& regex() const { return *regex_; }

  // Throws kInvalid on a bad pattern or an unknown category.
  static ReasonRule make(std::string pattern, std::string reason, Category category, Origin origin,
                         Recoverable recoverable, int priority, std::string mitigation = {},
                         Provenance provenance = Provenance::kShipped, std::string run_id = {});

 private:
  std::shared_ptr<const std::regex> regex_;
};

// Line format: pattern TAB reason TAB category TAB origin TAB recoverable TAB
// priority TAB mitigation [TAB provenance]. '#' starts a comment line.
class ReasonRuleTable {
 public:
  static ReasonRuleTable parse(std::istream& in);
  static ReasonRuleTable load(const std::filesystem::path& path);
  static ReasonRuleTable defaults();
  static std::string_view default_text();

  void append(ReasonRule rule) { rules_.push_back(std::move(rule)); }
  const std::vector<ReasonRule>& rules() const { return rules_; }
  std::size_t size() const { return rules_.size(); }
  void write(std::ostream& out) const;

  const std::vector<RuleReject>& rejected() const { return rejected_; }

 private:
  std::vector<ReasonRule> rules_;
  std::vector<RuleReject> rejected_;
};

// Highest-priority matching rule wins; ties go to the earlier table entry.
// evidence_lines index into `lines`.
std::optional<DiagnosisResult> rule_diagnose(const std::vector<std::string>& lines,
                                             const ReasonRuleTable& table);

}  // namespace acme::diag
