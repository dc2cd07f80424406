#include "acme/trace/trace_io.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>

#include "acme/common/csv.hpp"
#include "acme/common/error.hpp"
#include "acme/common/text.hpp"

namespace acme::trace {

const std::vector<std::string>& ColumnMap::canonical_fields() {
  static const std::vector<std::string> fields = text::split(kCanonicalHeader, ',');
  return fields;
}

const std::vector<std::string>& ColumnMap::required_fields() {
  static const std::vector<std::string> fields = {"job_id", "submit_time", "gpu_num", "state"};
  return fields;
}

ColumnMap ColumnMap::identity() {
  ColumnMap m;
  for (const auto& f : canonical_fields()) m.columns_[f] = f;
  return m;
}

ColumnMap ColumnMap::from_config(const KvConfig& cfg) {
  ColumnMap m = identity();
  for (const auto& [field, source] : cfg.with_prefix("trace.column")) {
    bool known = false;
    for (const auto& f : canonical_fields()) known = known || f == field;
    if (!known) throw Error(ErrorCode::kConfig, "trace.column." + field + ": unknown field");
    if (source.empty() || source == "-") {
      m.unmap(field);
    } else {
      m.map(field, source);
    }
  }
  const std::string unit = text::lower(cfg.get_string("trace.time_unit", "seconds"));
  if (unit == "seconds" || unit == "s") {
    m.time_unit = TimeUnit::kSeconds;
  } else if (unit == "milliseconds" || unit == "ms") {
    m.time_unit = TimeUnit::kMilliseconds;
  } else if (unit == "iso8601" || unit == "iso") {
    m.time_unit = TimeUnit::kIso8601;
  } else {
    throw Error(ErrorCode::kConfig, "trace.time_unit: unknown unit '" + unit + "'");
  }
  m.default_cluster = cfg.get_string("trace.cluster", "Other");
  return m;
}

void ColumnMap::map(const std::string& canonical, const std::string& source) {
  columns_[canonical] = source;
}

void ColumnMap::unmap(const std::string& canonical) {
  for (const auto& r : required_fields()) {
    if (r == canonical) throw Error(ErrorCode::kConfig, "cannot unmap required field " + canonical);
  }
  columns_.erase(canonical);
}

std::optional<std::string> ColumnMap::source_for(const std::string& canonical) const {
  const auto it = columns_.find(canonical);
  if (it == columns_.end()) return std::nullopt;
  return it->second;
}

std::optional<Seconds> parse_iso8601(std::string_view s) {
  s = text::trim(s);
  // YYYY-MM-DD?HH:MM:SS
  if (s.size() < 19 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') ||
      s[13] != ':' || s[16] != ':') {
    return std::nullopt;
  }
  const auto y = text::parse_int(s.substr(0, 4));
  const auto mo = text::parse_int(s.substr(5, 2));
  const auto d = text::parse_int(s.substr(8, 2));
  const auto h = text::parse_int(s.substr(11, 2));
  const auto mi = text::parse_int(s.substr(14, 2));
  const auto se = text::parse_int(s.substr(17, 2));
  if (!y || !mo || !d || !h || !mi || !se) return std::nullopt;
  std::string_view rest = s.substr(19);
  if (!rest.empty() && rest.front() == '.') {
    std::size_t i = 1;
    while (i < rest.size() && rest[i] >= '0' && rest[i] <= '9') ++i;
    rest.remove_prefix(i);  // sub-second part is floored away
  }
  if (!rest.empty() && rest != "Z" && rest != "+00:00") return std::nullopt;
  const std::chrono::year_month_day ymd{std::chrono::year(static_cast<int>(*y)),
                                        std::chrono::month(static_cast<unsigned>(*mo)),
                                        std::chrono::day(static_cast<unsigned>(*d))};
  if (!ymd.ok() || *h > 23 || *mi > 59 || *se > 60) return std::nullopt;
  const auto days = std::chrono::sys_days(ymd).time_since_epoch().count();
  return static_cast<Seconds>(days) * 86400 + *h * 3600 + *mi * 60 + *se;
}

namespace {

std::optional<Seconds> parse_time(std::string_view raw, TimeUnit unit) {
  switch (unit) {
    case TimeUnit::kIso8601:
      return parse_iso8601(raw);
    case TimeUnit::kSeconds:
    case TimeUnit::kMilliseconds: {
      const double scale = unit == TimeUnit::kSeconds ? 1.0 : 1e-3;
      if (const auto i = text::parse_int(raw)) {
        if (unit == TimeUnit::kSeconds) return *i;
        return static_cast<Seconds>(std::floor(static_cast<double>(*i) * scale));
      }
      const auto d = text::parse_double(raw);
      if (!d || !std::isfinite(*d)) return std::nullopt;
      return static_cast<Seconds>(std::floor(*d * scale));
    }
  }
  return std::nullopt;
}

struct RowError {
  std::string reason;
  std::string detail;
};

}  // namespace

ParseResult parse_trace(std::istream& in, const ColumnMap& map, const KeywordTable& keywords) {
  ParseResult result;
  csv::Reader reader(in);
  csv::Row header;
  if (!reader.next(header)) throw Error(ErrorCode::kData, "trace has no header row");

  // canonical field -> column index
  std::map<std::string, std::size_t> index;
  for (const auto& field : ColumnMap::canonical_fields()) {
    const auto source = map.source_for(field);
    if (!source) continue;
    std::optional<std::size_t> found;
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (text::trim(header[i]) == *source) found = i;
    }
    bool required = false;
    for (const auto& r : ColumnMap::required_fields()) required = required || r == field;
    if (!found) {
      // An identity-mapped optional field may simply be absent from the file.
      if (required || *source != field) {
        throw Error(ErrorCode::kData, "trace header lacks mapped column '" + *source +
                                          "' for field " + field);
      }
      continue;
    }
    index[field] = *found;
  }

  csv::Row row;
  while (reader.next(row)) {
    if (row.size() == 1 && text::trim(row[0]).empty()) continue;
    ++result.data_rows;
    const std::size_t line = reader.line_number();

    auto reject = [&](RowError e) {
      result.rejects.push_back(Reject{line, std::move(e.reason), std::move(e.detail)});
    };
    if (row.size() != header.size()) {
      reject({"wrong_field_count", "expected " + std::to_string(header.size()) + " fields, got " +
                                       std::to_string(row.size())});
      continue;
    }
    auto field = [&](const std::string& name) -> std::optional<std::string_view> {
      const auto it = index.find(name);
      if (it == index.end()) return std::nullopt;
      const std::string_view v = text::trim(row[it->second]);
      if (v.empty()) return std::nullopt;
      return v;
    };

    JobRecord rec;
    std::optional<RowError> error;
    auto fail = [&](std::string reason, std::string detail) {
      if (!error) error = RowError{std::move(reason), std::move(detail)};
    };

    if (const auto id = field("job_id")) {
      rec.job_id = std::string(*id);
    } else {
      fail("missing_value", "job_id is empty");
    }
    rec.cluster = ClusterId::parse(field("cluster").value_or(map.default_cluster));

    auto time_field = [&](const std::string& name) -> std::optional<Seconds> {
      const auto v = field(name);
      if (!v) return std::nullopt;
      const auto t = parse_time(*v, map.time_unit);
      if (!t) fail("bad_timestamp", name + " '" + std::string(*v) + "'");
      return t;
    };
    if (const auto submit = time_field("submit_time")) {
      rec.submit_time = *submit;
    } else if (!field("submit_time")) {
      fail("missing_value", "submit_time is empty");
    }
    rec.start_time = time_field("start_time");
    rec.end_time = time_field("end_time");

    auto int_field = [&](const std::string& name, bool required) -> std::int64_t {
      const auto v = field(name);
      if (!v) {
        if (required) fail("missing_value", name + " is empty");
        return 0;
      }
      const auto i = text::parse_int(*v);
      if (!i) {
        // Some exports write counts as floats ("8.0").
        const auto d = text::parse_double(*v);
        if (d && *d >= 0 && std::floor(*d) == *d) return static_cast<std::int64_t>(*d);
        fail("bad_integer", name + " '" + std::string(*v) + "'");
        return 0;
      }
      if (*i < 0) fail("bad_integer", name + " is negative");
      return *i;
    };
    rec.gpu_num = int_field("gpu_num", true);
    rec.cpu_num = int_field("cpu_num", false);
    rec.node_num = int_field("node_num", false);

    if (const auto s = field("state")) {
      if (const auto st = parse_status(*s)) {
        rec.state = *st;
      } else {
        fail("bad_state", "unknown state '" + std::string(*s) + "'");
      }
    } else {
      fail("missing_value", "state is empty");
    }
    if (const auto n = field("name")) rec.name = std::string(*n);

    std::optional<WorkloadType> explicit_label;
    if (const auto w = field("workload")) explicit_label = parse_workload(*w);
    rec.workload = classify_workload(rec.name.value_or(""), rec.gpu_num, explicit_label, keywords);

    if (!error) {
      if (rec.start_time && !rec.end_time) {
        fail("missing_end", "start_time present without end_time");
      } else if (!rec.start_time && rec.end_time) {
        fail("missing_start", "end_time present without start_time");
      } else if (rec.start_time && *rec.end_time < *rec.start_time) {
        fail("negative_duration", "end_time precedes start_time");
      } else if (rec.start_time && *rec.start_time < rec.submit_time) {
        fail("negative_queuing_delay", "start_time precedes submit_time");
      }
    }
    if (error) {
      reject(std::move(*error));
    } else {
      result.records.push_back(std::move(rec));
    }
  }
  return result;
}

ParseResult parse_trace(const std::filesystem::path& path, const ColumnMap& map,
                        const KeywordTable& keywords) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kData, "cannot open trace file: " + path.string());
  return parse_trace(in, map, keywords);
}

void write_trace(std::ostream& out, const std::vector<JobRecord>& records) {
  out << ColumnMap::kCanonicalHeader << '\n';
  auto opt = [](const std::optional<Seconds>& v) { return v ? std::to_string(*v) : std::string(); };
  for (const auto& r : records) {
    csv::Row row = {r.job_id,
                    r.cluster.name(),
                    std::string(to_string(r.workload)),
                    std::to_string(r.submit_time),
                    opt(r.start_time),
                    opt(r.end_time),
                    std::to_string(r.gpu_num),
                    std::to_string(r.cpu_num),
                    std::to_string(r.node_num),
                    std::string(to_string(r.state)),
                    r.name.value_or("")};
    out << csv::join(row) << '\n';
  }
}

}  // namespace acme::trace
