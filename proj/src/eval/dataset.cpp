#include "acme/eval/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>

#include "acme/common/csv.hpp"
#include "acme/common/error.hpp"
#include "acme/common/rng.hpp"
#include "acme/common/text.hpp"

namespace acme::eval {

std::int64_t to_ticks(double minutes) {
  return static_cast<std::int64_t>(std::llround(minutes * static_cast<double>(kTicksPerMinute)));
}

void EvalDataset::validate() const {
  if (name.empty()) throw Error(ErrorCode::kData, "dataset without a name");
  if (!(inference_minutes > 0) || inference_ticks() <= 0) {
    throw Error(ErrorCode::kData, "dataset " + name + ": inference_minutes must be > 0");
  }
  if (!(metric_minutes >= 0)) throw Error(ErrorCode::kData, "dataset " + name + ": metric_minutes must be >= 0");
  if (!(granularity >= 0)) throw Error(ErrorCode::kData, "dataset " + name + ": granularity must be >= 0");
}

std::vector<EvalDataset> parse_datasets(std::istream& in) {
  csv::Reader reader(in);
  csv::Row header;
  if (!reader.next(header)) throw Error(ErrorCode::kData, "dataset file is empty");
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[text::lower(text::trim(header[i]))] = i;
  for (const char* required : {"name", "inference_minutes"}) {
    if (!col.count(required)) throw Error(ErrorCode::kData, std::string("dataset file lacks column ") + required);
  }
  auto field = [&](const csv::Row& row, const char* name) -> std::string {
    const auto it = col.find(name);
    if (it == col.end() || it->second >= row.size()) return {};
    return std::string(text::trim(row[it->second]));
  };

  std::vector<EvalDataset> out;
  csv::Row row;
  while (reader.next(row)) {
    if (row.size() == 1 && text::trim(row[0]).empty()) continue;
    const std::string where = "dataset file line " + std::to_string(reader.line_number());
    EvalDataset d;
    d.name = field(row, "name");
    const std::string inf = field(row, "inference_minutes");
    if (inf.empty()) throw Error(ErrorCode::kData, where + ": missing inference prior for " + d.name);
    const auto inf_v = text::parse_double(inf);
    if (!inf_v) throw Error(ErrorCode::kData, where + ": bad inference_minutes '" + inf + "'");
    d.inference_minutes = *inf_v;
    if (const std::string m = field(row, "metric_minutes"); !m.empty()) {
      const auto v = text::parse_double(m);
      if (!v) throw Error(ErrorCode::kData, where + ": bad metric_minutes '" + m + "'");
      d.metric_minutes = *v;
    }
    if (const std::string s = field(row, "splittable"); !s.empty()) {
      const std::string v = text::lower(s);
      if (v == "1" || v == "true" || v == "yes") {
        d.splittable = true;
      } else if (v == "0" || v == "false" || v == "no") {
        d.splittable = false;
      } else {
        throw Error(ErrorCode::kData, where + ": bad splittable '" + s + "'");
      }
    }
    if (const std::string g = field(row, "granularity"); !g.empty()) {
      const auto v = text::parse_double(g);
      if (!v) throw Error(ErrorCode::kData, where + ": bad granularity '" + g + "'");
      d.granularity = *v;
    }
    d.validate();
    out.push_back(std::move(d));
  }
  if (out.empty()) throw Error(ErrorCode::kData, "dataset file has no datasets");
  return out;
}

std::vector<EvalDataset> load_datasets(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kData, "cannot open dataset file " + path.string());
  return parse_datasets(in);
}

void write_datasets(std::ostream& out, const std::vector<EvalDataset>& datasets) {
  out << "name,inference_minutes,metric_minutes,splittable,granularity\n";
  for (const auto& d : datasets) {
    out << csv::escape(d.name) << ',' << text::format_double(d.inference_minutes) << ','
        << text::format_double(d.metric_minutes) << ',' << (d.splittable ? "true" : "false") << ','
        << text::format_double(d.granularity) << '\n';
  }
}

namespace {

// Two decimals keeps the committed CSV readable.
double round2(double v) { return std::round(v * 100.0) / 100.0; }

}  // namespace

std::vector<EvalDataset> synthetic_eval_workload(std::uint64_t seed, int count) {
  if (count < 1) throw Error(ErrorCode::kInvalid, "workload needs at least one dataset");
  Rng rng(seed);
  // Mix per 63 datasets: 3 long generation suites, 1 judged chat suite that
  // cannot be split, 5 coding suites with long correctness tests, 14 medium
  // generation sets, and short multiple-choice benchmarks for the rest.
  const int n_long = std::max(1, count * 3 / 63);
  const int n_judge = count * 1 / 63;
  const int n_code = count * 5 / 63;
  const int n_gen = count * 14 / 63;
  std::vector<EvalDataset> out;
  for (int i = 0; i < count; ++i) {
    EvalDataset d;
    char name[32];
    int j = i;
    if (j < n_long) {
      std::snprintf(name, sizeof name, "longgen_%02d", j + 1);
      d.inference_minutes = rng.uniform(31.0, 34.0);
      d.metric_minutes = rng.uniform(1.0, 2.0);
      d.splittable = true;
      d.granularity = 15;
    } else if ((j -= n_long) < n_judge) {
      std::snprintf(name, sizeof name, "judge_%02d", j + 1);
      d.inference_minutes = rng.uniform(18.0, 20.0);
      d.metric_minutes = rng.uniform(4.0, 6.0);
    } else if ((j -= n_judge) < n_code) {
      std::snprintf(name, sizeof name, "code_%02d", j + 1);
      d.inference_minutes = rng.uniform(1.5, 6.0);
      d.metric_minutes = rng.uniform(1.0, 5.0);
      d.splittable = true;
      d.granularity = 0.5;
    } else if ((j -= n_code) < n_gen) {
      std::snprintf(name, sizeof name, "gen_%02d", j + 1);
      d.inference_minutes = std::exp(std::log(9.0) + 0.35 * rng.normal());
      d.metric_minutes = rng.uniform(0.3, 2.0);
      d.splittable = true;
      d.granularity = 1;
    } else {
      j -= n_gen;
      std::snprintf(name, sizeof name, "mcq_%02d", j + 1);
      d.inference_minutes = std::exp(std::log(4.0) + 0.6 * rng.normal());
      d.metric_minutes = rng.uniform(0.05, 0.5);
      d.splittable = rng.uniform() < 0.5;
      d.granularity = 1;
    }
    d.name = name;
    d.inference_minutes = std::max(round2(d.inference_minutes), 0.1);
    d.metric_minutes = round2(d.metric_minutes);
    out.push_back(std::move(d));
  }
  // Submission order carries no information about size.
  for (std::size_t i = out.size(); i > 1; --i) {
    std::swap(out[i - 1], out[rng.below(i)]);
  }
  return out;
}

}  // namespace acme::eval
