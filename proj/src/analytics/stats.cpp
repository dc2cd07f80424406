#include "acme/analytics/stats.hpp"

#include <algorithm>
#include <cmath>

namespace acme::analytics {

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::kDuration: return "duration";
    case Metric::kQueuingDelay: return "queuing_delay";
    case Metric::kGpuDemand: return "gpu_demand";
  }
  return "duration";
}

double lower_quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const auto idx = static_cast<std::size_t>(std::floor(q * static_cast<double>(sorted.size() - 1)));
  return sorted[std::min(idx, sorted.size() - 1)];
}

DistributionSummary summarize(std::vector<double> values) {
  DistributionSummary s;
  s.count = values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  // Summation in sorted order keeps the mean independent of input order.
  double sum = 0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  s.median = lower_quantile(values, 0.5);
  s.p5 = lower_quantile(values, 0.05);
  s.p95 = lower_quantile(values, 0.95);
  s.p99 = lower_quantile(values, 0.99);
  const double n = static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i + 1 < values.size() && values[i + 1] == values[i]) continue;
    s.cdf_points.push_back({values[i], static_cast<double>(i + 1) / n});
  }
  return s;
}

DistributionStats distribution_stats(const std::vector<trace::JobRecord>& records, Metric metric,
                                     GroupBy group_by) {
  DistributionStats out;
  std::map<std::string, std::vector<double>> samples;
  for (const auto& r : records) {
    std::optional<double> v;
    switch (metric) {
      case Metric::kDuration:
        if (const auto d = r.duration()) v = static_cast<double>(*d);
        break;
      case Metric::kQueuingDelay:
        if (const auto q = r.queuing_delay()) v = static_cast<double>(*q);
        break;
      case Metric::kGpuDemand:
        v = static_cast<double>(r.gpu_num);
        break;
    }
    if (!v) {
      ++out.excluded;
      continue;
    }
    std::string key = "all";
    if (group_by == GroupBy::kWorkload) key = std::string(trace::to_string(r.workload));
    if (group_by == GroupBy::kCluster) key = r.cluster.name();
    samples[key].push_back(*v);
  }
  for (auto& [key, values] : samples) out.groups[key] = summarize(std::move(values));
  return out;
}

}  // namespace acme::analytics
