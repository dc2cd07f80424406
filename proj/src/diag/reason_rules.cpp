#include "acme/diag/reason_rules.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "acme/common/error.hpp"
#include "acme/common/text.hpp"

namespace acme::diag {

namespace {

constexpr Category kI = Category::kInfrastructure;
constexpr Category kF = Category::kFramework;
constexpr Category kS = Category::kScript;
constexpr Origin kInfra = Origin::kInfrastructure;
constexpr Origin kUser = Origin::kUser;
constexpr Recoverable kYes = Recoverable::kYes;
constexpr Recoverable kNo = Recoverable::kNo;

struct ShippedRule {
  std::string_view reason;
  std::string_view pattern;
  std::string_view mitigation;
};

// Same order as reason_taxonomy(); priority falls by one per entry within a
// category band.
constexpr ShippedRule kShipped[] = {
    {"ECC Error", R"(uncorrectable ECC error|ECC error|Xid 48\b|Xid 63\b)",
     "Cordon the node and request a GPU memory check"},
    {"NVLink Error", R"(NVLink error|NVLINK error|uncorrectable NVLink|Xid 74\b)",
     "Run the pairwise allgather test and cordon the failing node"},
    {"CUDA Error",
     R"(CUDA error|CUDAError|cudaError[A-Za-z]*|CUBLAS_STATUS_EXECUTION_FAILED|an illegal memory access was encountered)",
     "Locate the faulty GPU with a detection test and restart from the last checkpoint"},
    {"NCCL Remote Error",
     R"(NCCL Remote Error|ncclRemoteError|remote process exit(?:ed|ing) prematurely)",
     "Check the peer node of the failed collective and restart"},
    {"NCCL Timeout Error",
     R"(Watchdog caught collective operation timeout|NCCL [Tt]imeout|ncclTimeout)",
     "Check for a straggler or hung rank and restart from the last checkpoint"},
    {"Node Failure", R"(NODE_FAIL|[Nn]ode failure|node \S+ (?:is )?not responding)",
     "Replace the failed node and restart"},
    {"Network Error",
     R"(NET/IB : Got completion|IBV_WC_[A-Z_]+|ibv_poll_cq|Network is unreachable|[Nn]etwork error)",
     "Check the InfiniBand link of the affected node"},
    {"S3 Storage Error",
     R"(botocore\.exceptions|S3UploadFailedError|S3 [Ss]torage [Ee]rror|NoSuchBucket|petrel_client)",
     "Retry after the object storage service recovers"},
    {"Connection Error",
     R"(\bConnection(?:Refused|Reset|Aborted)?Error\b|Connection refused|Connection reset by peer)",
     "Check the rendezvous endpoint and retry"},
    {"Out of Memory Error", R"(OutOfMemoryError|CUDA out of memory)",
     "Reduce micro-batch size or enable activation recomputation"},
    {"Dataloader Killed",
     R"(DataLoader worker \(pid\(?s?\)? ?[0-9, ]+\)? (?:is killed by signal|exited unexpectedly))",
     "Reduce dataloader workers or host memory pressure and restart"},
    {"Model Loading Error",
     R"(Error\(s\) in loading state_dict|Unable to load weights|Failed to load model)",
     "Check the checkpoint path and model configuration"},
    {"Dataset Loading Error", R"(DatasetGenerationError|Failed to load dataset)",
     "Check the dataset path and format"},
    {"Zero Division Error", R"(\bZeroDivisionError\b)", "Guard the division in the user code"},
    {"Value Error", R"(\bValueError\b)", "Fix the offending argument or configuration value"},
    {"Attribute Error", R"(\bAttributeError\b)", "Fix the attribute access in the user code"},
    {"Assertion Error", R"(\bAssertionError\b)", "Check the configuration against the failed assertion"},
    {"Runtime Error", R"(\bRuntimeError\b)", "Inspect the runtime error message and fix the job setup"},
    {"Syntax Error", R"(\bSyntaxError\b|\bIndentationError\b)", "Fix the syntax error in the script"},
    {"Name Error", R"(\bNameError\b)", "Define the missing name"},
    {"Import Error", R"(\b(?:ImportError|ModuleNotFoundError)\b)",
     "Install the missing package or fix the import"},
    {"Argument Error",
     R"(error: (?:unrecognized arguments|the following arguments are required|argument )|\bArgumentError\b)",
     "Fix the command-line arguments"},
    {"Called Process Error", R"(\bCalledProcessError\b)", "Check the failing subprocess command"},
    {"Permission Error", R"(\bPermissionError\b|Permission denied)", "Fix file permissions"},
    {"File Not Found Error", R"(\bFileNotFoundError\b|No such file or directory)",
     "Fix the file path"},
    {"OS Error", R"(\bOSError\b)", "Inspect the operating-system error"},
    {"Key Error", R"(\bKeyError\b)", "Fix the missing key"},
    {"Index Error", R"(\bIndexError\b)", "Fix the out-of-range index"},
    {"Type Error", R"(\bTypeError\b)", "Fix the argument types"},
};

std::string build_default_text();

}  // namespace

const std::vector<ReasonInfo>& reason_taxonomy() {
  static const std::vector<ReasonInfo> kTaxonomy = {
      {"ECC Error", kI, kInfra, kYes},
      {"NVLink Error", kI, kInfra, kYes},
      {"CUDA Error", kI, kInfra, kYes},
      {"NCCL Remote Error", kI, kInfra, kYes},
      {"NCCL Timeout Error", kI, kInfra, kYes},
      {"Node Failure", kI, kInfra, kYes},
      {"Network Error", kI, kInfra, kYes},
      {"S3 Storage Error", kI, kInfra, kYes},
      {"Connection Error", kI, kInfra, kYes},
      {"Out of Memory Error", kF, kUser, kNo},
      {"Dataloader Killed", kF, kInfra, kYes},
      {"Model Loading Error", kF, kUser, kNo},
      {"Dataset Loading Error", kF, kUser, kNo},
      {"Zero Division Error", kF, kUser, kNo},
      {"Value Error", kF, kUser, kNo},
      {"Attribute Error", kF, kUser, kNo},
      {"Assertion Error", kF, kUser, kNo},
      {"Runtime Error", kF, kUser, kNo},
      {"Syntax Error", kS, kUser, kNo},
      {"Name Error", kS, kUser, kNo},
      {"Import Error", kS, kUser, kNo},
      {"Argument Error", kS, kUser, kNo},
      {"Called Process Error", kS, kUser, kNo},
      {"Permission Error", kS, kUser, kNo},
      {"File Not Found Error", kS, kUser, kNo},
      {"OS Error", kS, kUser, kNo},
      {"Key Error", kS, kUser, kNo},
      {"Index Error", kS, kUser, kNo},
      {"Type Error", kS, kUser, kNo},
  };
  return kTaxonomy;
}

const ReasonInfo* find_reason(std::string_view name) {
  for (const auto& r : reason_taxonomy()) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

int category_band(Category c) {
  switch (c) {
    case Category::kInfrastructure: return kInfrastructureBand;
    case Category::kFramework: return kFrameworkBand;
    case Category::kScript: return kScriptBand;
    case Category::kUnknown: return 0;
  }
  return 0;
}

bool ReasonRule::matches(std::string_view line) const {
  return std::regex_search(line.begin(), line.end(), *regex_);
}

ReasonRule ReasonRule::make(std::string pattern, std::string reason, Category category,
                            Origin origin, Recoverable recoverable, int priority,
                            std::string mitigation, Provenance provenance, std::string run_id) {
  if (category == Category::kUnknown) {
    throw Error(ErrorCode::kInvalid, "reason rule '" + reason + "' needs a known category");
  }
  if (text::trim(reason).empty() || reason == kUnknownReason) {
    throw Error(ErrorCode::kInvalid, "reason rule needs a reason name");
  }
  ReasonRule r;
  try {
    r.regex_ = std::make_shared<const std::regex>(pattern, std::regex::ECMAScript | std::regex::optimize);
  } catch (const std::regex_error& e) {
    throw Error(ErrorCode::kInvalid, "invalid pattern '" + pattern + "': " + e.what());
  }
  r.pattern = std::move(pattern);
  r.reason = std::move(reason);
  r.category = category;
  r.origin = origin;
  r.recoverable = recoverable;
  r.priority = priority;
  r.mitigation = std::move(mitigation);
  r.provenance = provenance;
  r.run_id = std::move(run_id);
  return r;
}

ReasonRuleTable ReasonRuleTable::parse(std::istream& in) {
  ReasonRuleTable table;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty() || line.front() == '#') continue;
    const auto f = text::split(line, '\t');
    if (f.size() < 6) {
      table.rejected_.push_back({n, f[0], "expected at least 6 tab-separated fields"});
      continue;
    }
    const auto cat = parse_category(f[2]);
    const auto origin = parse_origin(f[3]);
    const auto rec = parse_recoverable(f[4]);
    const auto prio = text::parse_int(f[5]);
    if (!cat || !origin || !rec || !prio) {
      table.rejected_.push_back({n, f[0], "bad category, origin, recoverable or priority"});
      continue;
    }
    Provenance prov = Provenance::kShipped;
    std::string run_id;
    if (f.size() >= 8) {
      const std::string_view p = text::trim(f[7]);
      if (p.starts_with("learned:")) {
        prov = Provenance::kAgentLearned;
        run_id = std::string(p.substr(8));
      }
    }
    try {
      table.rules_.push_back(ReasonRule::make(f[0], std::string(text::trim(f[1])), *cat, *origin,
                                              *rec, static_cast<int>(*prio),
                                              f.size() >= 7 ? f[6] : std::string(), prov, run_id));
    } catch (const Error& e) {
      table.rejected_.push_back({n, f[0], e.what()});
    }
  }
  return table;
}

ReasonRuleTable ReasonRuleTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kData, "cannot open reason rules " + path.string());
  return parse(in);
}

std::string_view ReasonRuleTable::default_text() {
  static const std::string kText = build_default_text();
  return kText;
}

ReasonRuleTable ReasonRuleTable::defaults() {
  std::istringstream in{std::string(default_text())};
  return parse(in);
}

void ReasonRuleTable::write(std::ostream& out) const {
  for (const auto& r : rules_) {
    out << r.pattern << '\t' << r.reason << '\t' << to_string(r.category) << '\t'
        << to_string(r.origin) << '\t' << to_string(r.recoverable) << '\t' << r.priority << '\t'
        << r.mitigation << '\t'
        << (r.provenance == Provenance::kShipped ? std::string("shipped") : "learned:" + r.run_id)
        << '\n';
  }
}

namespace {

std::string build_default_text() {
  std::ostringstream out;
  out << "# pattern\treason\tcategory\torigin\trecoverable\tpriority\tmitigation\tprovenance\n";
  int rank[4] = {0, 0, 0, 0};
  for (const auto& s : kShipped) {
    const ReasonInfo* info = find_reason(s.reason);
    const int offset = 99 - rank[static_cast<int>(info->category)]++;
    out << s.pattern << '\t' << s.reason << '\t' << to_string(info->category) << '\t'
        << to_string(info->origin) << '\t' << to_string(info->recoverable) << '\t'
        << category_band(info->category) + offset << '\t' << s.mitigation << "\tshipped\n";
  }
  return out.str();
}

}  // namespace

std::optional<DiagnosisResult> rule_diagnose(const std::vector<std::string>& lines,
                                             const ReasonRuleTable& table) {
  const ReasonRule* best = nullptr;
  for (const auto& rule : table.rules()) {
    if (best && rule.priority <= best->priority) continue;
    for (const auto& line : lines) {
      if (rule.matches(line)) {
        best = &rule;
        break;
      }
    }
  }
  if (!best) return std::nullopt;
  DiagnosisResult r;
  r.reason = best->reason;
  r.category = best->category;
  r.origin = best->origin;
  r.recoverable = best->recoverable;
  r.mitigation = best->mitigation;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (best->matches(lines[i])) r.evidence_lines.push_back(i);
  }
  return r;
}

}  // namespace acme::diag
