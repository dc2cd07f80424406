#include "acme/diag/filter.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "acme/common/error.hpp"
#include "acme/common/text.hpp"

namespace acme::diag {

namespace {

std::shared_ptr<const std::regex> compile(const std::string& pattern) {
  try {
    return std::make_shared<const std::regex>(pattern, std::regex::ECMAScript | std::regex::optimize);
  } catch (const std::regex_error& e) {
    throw Error(ErrorCode::kInvalid, "invalid pattern '" + pattern + "': " + e.what());
  }
}

}  // namespace

ValidationCorpus ValidationCorpus::parse(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    lines.push_back(line);
  }
  return ValidationCorpus(std::move(lines));
}

ValidationCorpus ValidationCorpus::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kData, "cannot open validation corpus " + path.string());
  return parse(in);
}

const std::string* ValidationCorpus::first_match(const std::regex& re) const {
  for (const auto& line : lines_) {
    if (std::regex_search(line, re)) return &line;
  }
  return nullptr;
}

FilterRule::FilterRule(std::string pattern, Provenance provenance, std::string run_id)
    : pattern_(std::move(pattern)),
      provenance_(provenance),
      run_id_(std::move(run_id)),
      regex_(compile(pattern_)) {}

bool FilterRule::matches(std::string_view line) const {
  return std::regex_search(line.begin(), line.end(), *regex_);
}

FilterRuleFile FilterRuleFile::parse(std::istream& in, const ValidationCorpus* corpus) {
  FilterRuleFile out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty() || line.front() == '#') continue;
    const auto fields = text::split(line, '\t');
    Provenance prov = Provenance::kShipped;
    std::string run_id;
    if (fields.size() >= 2) {
      const std::string_view p = text::trim(fields[1]);
      if (p.starts_with("learned:")) {
        prov = Provenance::kAgentLearned;
        run_id = std::string(p.substr(8));
      } else if (p != "shipped") {
        out.rejected.push_back({n, fields[0], "unknown provenance '" + std::string(p) + "'"});
        continue;
      }
    }
    try {
      FilterRule rule(fields[0], prov, run_id);
      if (fields.size() >= 3) {
        if (const auto hits = text::parse_int(fields[2]); hits && *hits >= 0) {
          rule.add_hits(static_cast<std::uint64_t>(*hits));
        }
      }
      if (corpus) {
        if (const std::string* hit = corpus->first_match(rule.regex())) {
          out.rejected.push_back({n, fields[0], "matches error line: " + *hit});
          continue;
        }
      }
      out.rules.push_back(std::move(rule));
    } catch (const Error& e) {
      out.rejected.push_back({n, fields[0], e.what()});
    }
  }
  return out;
}

FilterRuleFile FilterRuleFile::load(const std::filesystem::path& path,
                                    const ValidationCorpus* corpus) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kData, "cannot open filter rules " + path.string());
  return parse(in, corpus);
}

void write_filter_rules(std::ostream& out, const std::vector<FilterRule>& rules) {
  for (const auto& r : rules) {
    out << r.pattern() << '\t'
        << (r.provenance() == Provenance::kShipped ? std::string("shipped") : "learned:" + r.run_id())
        << '\t' << r.hit_count() << '\n';
  }
}

FilterResult apply_filters(const std::vector<std::string>& lines,
                           const std::vector<FilterRule>& rules) {
  FilterResult out;
  out.hits.assign(rules.size(), 0);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    bool dropped = false;
    for (std::size_t r = 0; r < rules.size(); ++r) {
      if (rules[r].matches(lines[i])) {
        ++out.hits[r];
        dropped = true;
        break;
      }
    }
    if (!dropped) {
      out.kept_lines.push_back(lines[i]);
      out.kept_index.push_back(i);
    }
  }
  return out;
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.emplace_back(line);
    start = end + 1;
  }
  return lines;
}

std::vector<Segment> segment_lines(const std::vector<std::string>& lines, std::size_t max_bytes) {
  std::vector<Segment> out;
  std::size_t begin = 0;
  std::size_t bytes = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t len = lines[i].size() + 1;
    if (i > begin && bytes + len > max_bytes) {
      out.push_back({begin, i});
      begin = i;
      bytes = 0;
    }
    bytes += len;
  }
  if (begin < lines.size()) out.push_back({begin, lines.size()});
  return out;
}

std::vector<FilterRule> default_filter_rules() {
  static const char* const kPatterns[] = {
      R"(^\[[0-9: -]+\] step [0-9]+/[0-9]+ \| loss )",
      R"( NCCL INFO )",
      R"(^\[[0-9: -]+\] INFO \[(?:timer|ckpt|data|launcher)\] )",
      R"(^\s*$)",
  };
  std::vector<FilterRule> out;
  for (const char* p : kPatterns) out.emplace_back(p, Provenance::kShipped);
  return out;
}

}  // namespace acme::diag
