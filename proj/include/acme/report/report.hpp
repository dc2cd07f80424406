#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace acme::report {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  friend bool operator==(const Table&, const Table&) = default;
};

// Two-column whitespace-separated plot data.
struct PlotData {
  std::string x_label;
  std::string y_label;
  std::vector<std::pair<double, double>> points;

  friend bool operator==(const PlotData&, const PlotData&) = default;
};

struct Report {
  std::string command;
  std::optional<std::uint64_t> seed;
  std::map<std::string, std::string> config;
  Json results = Json::object();
  std::map<std::string, Table> tables;    // written as <name>.csv
  std::map<std::string, PlotData> plots;  // written as <name>.dat

  // Tables and plots are listed by file name only; their content lives in
  // the side files.
  Json to_json() const;
  // Throws kData on a missing field or a different schema version.
  static Report from_json(const Json& j);
  // report.json bytes: two-space indent, trailing newline.
  std::string dump() const;
};

void write_table(std::ostream& out, const Table& table);
Table read_table(std::istream& in);
void write_plot(std::ostream& out, const PlotData& plot);
PlotData read_plot(std::istream& in);

// Writes report.json and the side files into `out_dir`. Everything is staged
// in a sibling directory and renamed into place, so a failure leaves no
// partial output. Throws kIo when the directory cannot be written.
void emit_report(const Report& report, const std::filesystem::path& out_dir);

// Reads report.json plus every listed table and plot back.
Report load_report(const std::filesystem::path& dir);

}  // namespace acme::report
