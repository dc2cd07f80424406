#include "acme/report/report.hpp"

#include <fstream>
#include <sstream>
#include <system_error>

#include "acme/common/csv.hpp"
#include "acme/common/error.hpp"
#include "acme/common/text.hpp"

namespace acme::report {

namespace fs = std::filesystem;

Json Report::to_json() const {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  j["seed"] = seed ? Json(*seed) : Json(nullptr);
  Json cfg = Json::object();
  for (const auto& [k, v] : config) cfg[k] = v;
  j["config"] = cfg;
  j["results"] = results;
  Json files = Json::object();
  files["tables"] = Json::array();
  for (const auto& [name, t] : tables) files["tables"].push_back(name + ".csv");
  files["plots"] = Json::array();
  for (const auto& [name, p] : plots) files["plots"].push_back(name + ".dat");
  j["files"] = files;
  return j;
}

Report Report::from_json(const Json& j) {
  try {
    if (!j.is_object()) throw Error(ErrorCode::kData, "report is not a JSON object");
    if (j.at("schema_version").get<int>() != kSchemaVersion) {
      throw Error(ErrorCode::kData, "unsupported report schema version " + j.at("schema_version").dump());
    }
    Report r;
    r.command = j.at("command").get<std::string>();
    if (!j.at("seed").is_null()) r.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& [k, v] : j.at("config").items()) r.config[k] = v.get<std::string>();
    r.results = j.at("results");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kData, std::string("malformed report: ") + e.what());
  }
}

std::string Report::dump() const { return to_json().dump(2) + "\n"; }

void write_table(std::ostream& out, const Table& table) {
  out << csv::join(table.header) << '\n';
  for (const auto& row : table.rows) out << csv::join(row) << '\n';
}

Table read_table(std::istream& in) {
  Table t;
  csv::Reader reader(in);
  csv::Row row;
  if (!reader.next(row)) throw Error(ErrorCode::kData, "table has no header");
  t.header = row;
  while (reader.next(row)) t.rows.push_back(row);
  return t;
}

void write_plot(std::ostream& out, const PlotData& plot) {
  out << "# " << plot.x_label << ' ' << plot.y_label << '\n';
  for (const auto& [x, y] : plot.points) {
    out << text::format_double(x) << ' ' << text::format_double(y) << '\n';
  }
}

PlotData read_plot(std::istream& in) {
  PlotData p;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream labels(line.substr(1));
      labels >> p.x_label >> p.y_label;
      continue;
    }
    const auto fields = text::split(line, ' ');
    std::optional<double> x;
    std::optional<double> y;
    if (fields.size() == 2) {
      x = text::parse_double(fields[0]);
      y = text::parse_double(fields[1]);
    }
    if (!x || !y) throw Error(ErrorCode::kData, "bad plot line: " + line);
    p.points.emplace_back(*x, *y);
  }
  return p;
}

namespace {

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  out << bytes;
  out.close();
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
}

}  // namespace

void emit_report(const Report& report, const fs::path& out_dir) {
  std::error_code ec;
  const fs::path target = out_dir.lexically_normal();
  const fs::path parent = target.has_parent_path() ? target.parent_path() : fs::path(".");
  fs::create_directories(parent, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + parent.string() + ": " + ec.message());

  const fs::path staging = parent / ("." + target.filename().string() + ".staging");
  fs::remove_all(staging, ec);
  fs::create_directory(staging, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + staging.string() + ": " + ec.message());
  try {
    write_file(staging / "report.json", report.dump());
    for (const auto& [name, table] : report.tables) {
      std::ostringstream s;
      write_table(s, table);
      write_file(staging / (name + ".csv"), s.str());
    }
    for (const auto& [name, plot] : report.plots) {
      std::ostringstream s;
      write_plot(s, plot);
      write_file(staging / (name + ".dat"), s.str());
    }
    fs::remove_all(target, ec);
    if (ec) throw Error(ErrorCode::kIo, "cannot replace " + target.string() + ": " + ec.message());
    fs::rename(staging, target, ec);
    if (ec) throw Error(ErrorCode::kIo, "cannot move output into " + target.string() + ": " + ec.message());
  } catch (...) {
    fs::remove_all(staging, ec);
    throw;
  }
}

Report load_report(const fs::path& dir) {
  std::ifstream in(dir / "report.json", std::ios::binary);
  if (!in) throw Error(ErrorCode::kData, "cannot read " + (dir / "report.json").string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kData, std::string("malformed report.json: ") + e.what());
  }
  Report r = Report::from_json(j);
  for (const auto& f : j.at("files").at("tables")) {
    const std::string file = f.get<std::string>();
    std::ifstream t(dir / file, std::ios::binary);
    if (!t) throw Error(ErrorCode::kData, "missing table " + file);
    r.tables[file.substr(0, file.size() - 4)] = read_table(t);
  }
  for (const auto& f : j.at("files").at("plots")) {
    const std::string file = f.get<std::string>();
    std::ifstream p(dir / file, std::ios::binary);
    if (!p) throw Error(ErrorCode::kData, "missing plot " + file);
    r.plots[file.substr(0, file.size() - 4)] = read_plot(p);
  }
  return r;
}

}  // namespace acme::report
