#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace acme::eval {

// Inference work is accounted in integer ticks so that splitting a dataset
// into shards conserves it exactly.
inline constexpr std::int64_t kTicksPerMinute = 1'000'000;
std::int64_t to_ticks(double minutes);
inline double ticks_to_minutes(std::int64_t t) { return static_cast<double>(t) / kTicksPerMinute; }
inline double ticks_to_seconds(std::int64_t t) { return ticks_to_minutes(t) * 60.0; }

struct EvalDataset {
  std::string name;
  double inference_minutes = 0;  // prior runtime on one GPU
  double metric_minutes = 0;     // CPU metric computation after inference
  bool splittable = false;
  double granularity = 0;  // minimum shard inference minutes

  std::int64_t inference_ticks() const { return to_ticks(inference_minutes); }
  // Throws kData.
  void validate() const;
};

// CSV: name,inference_minutes,metric_minutes,splittable,granularity
std::vector<EvalDataset> parse_datasets(std::istream& in);
std::vector<EvalDataset> load_datasets(const std::filesystem::path& path);
void write_datasets(std::ostream& out, const std::vector<EvalDataset>& datasets);

// Synthetic 63-dataset campaign for a 7B model. Many short benchmarks, a
// few long generation-heavy ones, and coding suites with long metric runs.
// Calibration artifact, not measured data.
std::vector<EvalDataset> synthetic_eval_workload(std::uint64_t seed, int count = 63);

}  // namespace acme::eval
