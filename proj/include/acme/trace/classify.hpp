#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "acme/trace/job_record.hpp"

namespace acme::trace {

struct KeywordRule {
  std::string keyword;  // lower-case substring of the job name
  WorkloadType workload;
  std::int64_t min_gpus = 0;
};

// Ordered keyword table: the first rule whose keyword occurs in the lower-cased
// job name (and whose GPU floor is met) decides the workload.
//
// File format, one rule per line, '#' comments:
//   keyword <TAB> workload [<TAB> min_gpus]
class KeywordTable {
 public:
  KeywordTable() = default;
  explicit KeywordTable(std::vector<KeywordRule> rules) : rules_(std::move(rules)) {}

  static KeywordTable parse(std::string_view text);
  static KeywordTable load(const std::filesystem::path& path);
  static const KeywordTable& defaults();
  static std::string_view default_text();

  const std::vector<KeywordRule>& rules() const { return rules_; }

 private:
  std::vector<KeywordRule> rules_;
};

WorkloadType classify_workload(std::string_view name, std::int64_t gpu_num,
                               std::optional<WorkloadType> explicit_label,
                               const KeywordTable& table = KeywordTable::defaults());

}  // namespace acme::trace
