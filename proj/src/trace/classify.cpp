#include "acme/trace/classify.hpp"

#include <fstream>
#include <sstream>

#include "acme/common/error.hpp"
#include "acme/common/text.hpp"

namespace acme::trace {

namespace {

// Mirrors data/workload_keywords.tsv; a unit test keeps the two identical.
constexpr std::string_view kDefaultTable =
    "# keyword\tworkload\t[min_gpus]\n"
    "# First match wins. Keywords are matched as lower-case substrings of the job name.\n"
    "pretrain\tPretraining\n"
    "humaneval\tEvaluation\n"
    "mbpp\tEvaluation\n"
    "mmlu\tEvaluation\n"
    "gsm8k\tEvaluation\n"
    "ceval\tEvaluation\n"
    "bbh\tEvaluation\n"
    "triviaqa\tEvaluation\n"
    "eval\tEvaluation\n"
    "sft\tSFT\n"
    "finetune\tSFT\n"
    "mllm\tMLLM\n"
    "multimodal\tMLLM\n"
    "debug\tDebug\n"
    "test\tDebug\n";

}  // namespace

std::string_view KeywordTable::default_text() { return kDefaultTable; }

KeywordTable KeywordTable::parse(std::string_view text) {
  std::vector<KeywordRule> rules;
  int lineno = 0;
  for (const auto& raw : text::split(text, '\n')) {
    ++lineno;
    const std::string_view line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto cols = text::split(line, '\t');
    if (cols.size() < 2 || cols.size() > 3) {
      throw Error(ErrorCode::kConfig,
                  "keyword table line " + std::to_string(lineno) + ": expected 2 or 3 columns");
    }
    const auto workload = parse_workload(cols[1]);
    if (!workload) {
      throw Error(ErrorCode::kConfig, "keyword table line " + std::to_string(lineno) +
                                          ": unknown workload '" + cols[1] + "'");
    }
    KeywordRule rule{text::lower(text::trim(cols[0])), *workload, 0};
    if (cols.size() == 3) {
      const auto min = text::parse_int(cols[2]);
      if (!min || *min < 0) {
        throw Error(ErrorCode::kConfig,
                    "keyword table line " + std::to_string(lineno) + ": bad min_gpus");
      }
      rule.min_gpus = *min;
    }
    rules.push_back(std::move(rule));
  }
  return KeywordTable(std::move(rules));
}

KeywordTable KeywordTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kData, "cannot open keyword table: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

const KeywordTable& KeywordTable::defaults() {
  static const KeywordTable table = parse(kDefaultTable);
  return table;
}

WorkloadType classify_workload(std::string_view name, std::int64_t gpu_num,
                               std::optional<WorkloadType> explicit_label,
                               const KeywordTable& table) {
  if (explicit_label) return *explicit_label;
  const std::string lowered = text::lower(name);
  for (const auto& rule : table.rules()) {
    if (gpu_num < rule.min_gpus) continue;
    if (lowered.find(rule.keyword) != std::string::npos) return rule.workload;
  }
  return WorkloadType::kOther;
}

}  // namespace acme::trace
