#pragma once

#include <string>
#include <vector>

#include "acme/trace/job_record.hpp"

namespace acme::analytics {

struct BreakdownRow {
  std::string group;
  std::size_t count = 0;
  double gpu_time = 0;  // GPU-seconds
  double count_share = 0;
  double gpu_time_share = 0;
  friend bool operator==(const BreakdownRow&, const BreakdownRow&) = default;
};

// One row per WorkloadType, in enum order, including empty groups. GPU time is
// requested GPUs x duration. When the total GPU time is zero all GPU-time
// shares are zero.
std::vector<BreakdownRow> workload_breakdown(const std::vector<trace::JobRecord>& records);
std::vector<BreakdownRow> final_status_breakdown(const std::vector<trace::JobRecord>& records);

// tCO2e = energy (MWh) x emission rate (tCO2e/MWh). Negative inputs throw.
double carbon_estimate(double energy_mwh, double rate_tco2e_per_mwh);

inline constexpr double kAcmeCarbonRate = 0.478;  // tCO2e/MWh

}  // namespace acme::analytics
