#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "acme/common/kv_config.hpp"
#include "acme/trace/classify.hpp"
#include "acme/trace/job_record.hpp"

namespace acme::trace {

enum class TimeUnit { kSeconds, kMilliseconds, kIso8601 };

// Canonical field name -> source column header.
class ColumnMap {
 public:
  static constexpr const char* kCanonicalHeader =
      "job_id,cluster,workload,submit_time,start_time,end_time,gpu_num,cpu_num,node_num,state,name";
  static const std::vector<std::string>& canonical_fields();
  static const std::vector<std::string>& required_fields();

  // Every canonical field maps to the column of the same name.
  static ColumnMap identity();
  // Reads `trace.column.<field> = <source>` and `trace.time_unit`; fields not
  // listed keep their canonical name.
  static ColumnMap from_config(const KvConfig& cfg);

  void map(const std::string& canonical, const std::string& source);
  void unmap(const std::string& canonical);
  std::optional<std::string> source_for(const std::string& canonical) const;

  TimeUnit time_unit = TimeUnit::kSeconds;
  // Used when the cluster column is absent or empty.
  std::string default_cluster = "Other";

 private:
  std::map<std::string, std::string> columns_;
};

struct Reject {
  std::size_t line = 0;   // 1-based line in the file
  std::string reason;     // machine-readable code, e.g. "negative_duration"
  std::string detail;
};

struct ParseResult {
  std::vector<JobRecord> records;
  std::vector<Reject> rejects;
  std::size_t data_rows = 0;
};

ParseResult parse_trace(std::istream& in, const ColumnMap& map,
                        const KeywordTable& keywords = KeywordTable::defaults());
ParseResult parse_trace(const std::filesystem::path& path, const ColumnMap& map,
                        const KeywordTable& keywords = KeywordTable::defaults());

// Canonical CSV, header included.
void write_trace(std::ostream& out, const std::vector<JobRecord>& records);

// Parses "YYYY-MM-DD[ T]HH:MM:SS[.fff][Z]" as UTC seconds since the Unix epoch.
std::optional<Seconds> parse_iso8601(std::string_view s);

}  // namespace acme::trace
