#include "acme/analytics/breakdown.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "acme/common/error.hpp"

namespace acme::analytics {

namespace {

template <typename Key, std::size_t N>
std::vector<BreakdownRow> breakdown(const std::vector<trace::JobRecord>& records,
                                    const Key (&keys)[N],
                                    const std::function<Key(const trace::JobRecord&)>& key_of) {
  std::vector<BreakdownRow> rows(N);
  std::vector<std::vector<double>> gpu_times(N);
  for (std::size_t i = 0; i < N; ++i) rows[i].group = std::string(trace::to_string(keys[i]));
  for (const auto& r : records) {
    const Key k = key_of(r);
    for (std::size_t i = 0; i < N; ++i) {
      if (keys[i] == k) {
        ++rows[i].count;
        gpu_times[i].push_back(r.gpu_time());
      }
    }
  }
  double total_time = 0;
  for (std::size_t i = 0; i < N; ++i) {
    // Sorted summation: independent of record order.
    std::sort(gpu_times[i].begin(), gpu_times[i].end());
    for (double t : gpu_times[i]) rows[i].gpu_time += t;
    total_time += rows[i].gpu_time;
  }
  const double total_count = static_cast<double>(records.size());
  for (auto& row : rows) {
    row.count_share = total_count > 0 ? static_cast<double>(row.count) / total_count : 0.0;
    row.gpu_time_share = total_time > 0 ? row.gpu_time / total_time : 0.0;
  }
  return rows;
}

}  // namespace

std::vector<BreakdownRow> workload_breakdown(const std::vector<trace::JobRecord>& records) {
  return breakdown<trace::WorkloadType>(records, trace::kAllWorkloads,
                                        [](const trace::JobRecord& r) { return r.workload; });
}

std::vector<BreakdownRow> final_status_breakdown(const std::vector<trace::JobRecord>& records) {
  return breakdown<trace::FinalStatus>(records, trace::kAllStatuses,
                                       [](const trace::JobRecord& r) { return r.state; });
}

double carbon_estimate(double energy_mwh, double rate_tco2e_per_mwh) {
  if (!(energy_mwh >= 0) || !(rate_tco2e_per_mwh >= 0)) {
    throw Error(ErrorCode::kInvalid, "carbon_estimate: inputs must be non-negative");
  }
  return energy_mwh * rate_tco2e_per_mwh;
}

}  // namespace acme::analytics
