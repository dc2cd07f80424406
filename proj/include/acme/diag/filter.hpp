#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

namespace acme::diag {

enum class Provenance { kShipped, kAgentLearned };

// Lines known to carry error information. A filter rule may never match one.
class ValidationCorpus {
 public:
  ValidationCorpus() = default;
  explicit ValidationCorpus(std::vector<std::string> lines) : lines_(std::move(lines)) {}
  static ValidationCorpus load(const std::filesystem::path& path);
  static ValidationCorpus parse(std::istream& in);

  const std::vector<std::string>& lines() const { return lines_; }
  // First corpus line matched by `re`, or nullptr.
  const std::string* first_match(const std::regex& re) const;

 private:
  std::vector<std::string> lines_;
};

class FilterRule {
 public:
  // Throws kInvalid when the pattern does not compile.
  FilterRule(std::string pattern, Provenance provenance = Provenance::kShipped,
             std::string run_id = {});

  const std::string& pattern() const { return pattern_; }
  Provenance provenance() const { return provenance_; }
  const std::string& run_id() const { return run_id_; }
  std::uint64_t hit_count() const { return hit_count_; }
  void add_hits(std::uint64_t n) { hit_count_ += n; }
  bool matches(std::string_view line) const;
  const std::regex& regex() const { return *regex_; }

 private:
  std::string pattern_;
  Provenance provenance_;
  std::string run_id_;
  std::uint64_t hit_count_ = 0;
  std::shared_ptr<const std::regex> regex_;
};

struct RuleReject {
  std::size_t line = 0;
  std::string pattern;
  std::string reason;
};

// Line format: pattern TAB provenance [TAB hit_count], where provenance is
// "shipped" or "learned:<run id>". '#' starts a comment line.
struct FilterRuleFile {
  std::vector<FilterRule> rules;
  std::vector<RuleReject> rejected;

  static FilterRuleFile parse(std::istream& in, const ValidationCorpus* corpus = nullptr);
  static FilterRuleFile load(const std::filesystem::path& path,
                             const ValidationCorpus* corpus = nullptr);
};
void write_filter_rules(std::ostream& out, const std::vector<FilterRule>& rules);

// Shipped rules for routine trainer output: per-step metric lines, NCCL INFO
// chatter, timer/checkpoint/data INFO lines and blank lines.
std::vector<FilterRule> default_filter_rules();

struct FilterResult {
  std::vector<std::string> kept_lines;
  std::vector<std::size_t> kept_index;  // position of each kept line in the input
  std::vector<std::uint64_t> hits;      // per rule
};

FilterResult apply_filters(const std::vector<std::string>& lines,
                           const std::vector<FilterRule>& rules);

std::vector<std::string> split_lines(std::string_view text);

// Half-open line ranges whose joined size stays within max_bytes; a single
// longer line forms its own segment.
struct Segment {
  std::size_t begin = 0;
  std::size_t end = 0;
};
inline constexpr std::size_t kSegmentBytes = 64 * 1024;
std::vector<Segment> segment_lines(const std::vector<std::string>& lines,
                                   std::size_t max_bytes = kSegmentBytes);

}  // namespace acme::diag
