#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "acme/trace/job_record.hpp"

namespace acme::analytics {

enum class Metric { kDuration, kQueuingDelay, kGpuDemand };
enum class GroupBy { kNone, kWorkload, kCluster };

std::string_view to_string(Metric m);

struct CdfPoint {
  double value = 0;
  double fraction = 0;  // share of samples <= value
  friend bool operator==(const CdfPoint&, const CdfPoint&) = default;
};

struct DistributionSummary {
  std::size_t count = 0;
  double mean = 0;
  double median = 0;
  double p5 = 0;
  double p95 = 0;
  double p99 = 0;
  std::vector<CdfPoint> cdf_points;  // one point per distinct value
  friend bool operator==(const DistributionSummary&, const DistributionSummary&) = default;
};

// Lower-interpolation quantile: the element at index floor(q * (n - 1)) of the
// sorted sample.
double lower_quantile(const std::vector<double>& sorted, double q);

DistributionSummary summarize(std::vector<double> values);

struct DistributionStats {
  // Group label ("all", a workload name, or a cluster name) -> summary.
  std::map<std::string, DistributionSummary> groups;
  // Records skipped because the metric is undefined for them (never started).
  std::size_t excluded = 0;
};

DistributionStats distribution_stats(const std::vector<trace::JobRecord>& records, Metric metric,
                                     GroupBy group_by = GroupBy::kNone);

}  // namespace acme::analytics
