#include <algorithm>
#include <cctype>
#include <iterator>
#include <ostream>
#include <set>

#include "acme/analytics/breakdown.hpp"
#include "acme/analytics/stats.hpp"
#include "acme/cli/commands.hpp"
#include "acme/common/error.hpp"
#include "acme/common/text.hpp"
#include "acme/report/serialize.hpp"
#include "acme/trace/classify.hpp"

namespace acme::cli {

namespace {

using report::Json;
using report::Table;
using text::format_double;

constexpr analytics::Metric kMetrics[] = {analytics::Metric::kDuration, analytics::Metric::kQueuingDelay,
                                          analytics::Metric::kGpuDemand};

std::string slug(std::string_view s) {
  std::string out;
  for (char c : text::lower(s)) out += (std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
  return out;
}

Json summary_json(const analytics::DistributionSummary& s) {
  Json j = report::encode(s);
  j.erase("cdf_points");  // written to the .dat side files
  return j;
}

void add_breakdown(Table& table, const std::string& scope, const std::vector<analytics::BreakdownRow>& rows) {
  for (const auto& r : rows) {
    table.rows.push_back({scope, r.group, std::to_string(r.count), format_double(r.gpu_time),
                          format_double(r.count_share), format_double(r.gpu_time_share)});
  }
}

Json breakdown_json(const std::vector<analytics::BreakdownRow>& rows) {
  Json a = Json::array();
  for (const auto& r : rows) a.push_back(report::encode(r));
  return a;
}

}  // namespace

report::Report run_analyze(const RunConfig& rc, std::ostream& summary) {
  const std::uint64_t seed = rc.require_seed();
  if (!rc.trace_path) throw Error(ErrorCode::kConfig, "analyze needs trace.path");
  const trace::KeywordTable keywords =
      rc.keywords_path ? trace::KeywordTable::load(*rc.keywords_path) : trace::KeywordTable::defaults();
  const trace::ParseResult parsed = trace::parse_trace(*rc.trace_path, rc.columns, keywords);

  std::vector<trace::JobRecord> gpu_jobs;
  std::size_t cpu_jobs = 0;
  std::set<std::string> clusters;
  for (const auto& r : parsed.records) {
    if (r.is_gpu_job()) {
      gpu_jobs.push_back(r);
      clusters.insert(r.cluster.name());
    } else {
      ++cpu_jobs;
    }
  }

  report::Report rep;
  rep.command = "analyze";
  rep.seed = seed;
  rep.config = rc.recorded();

  Json trace_info;
  trace_info["data_rows"] = parsed.data_rows;
  trace_info["records"] = parsed.records.size();
  trace_info["rejects"] = parsed.rejects.size();
  trace_info["gpu_jobs"] = gpu_jobs.size();
  trace_info["cpu_jobs"] = cpu_jobs;
  rep.results["trace"] = trace_info;

  Table workload_table{{"scope", "group", "count", "gpu_time", "count_share", "gpu_time_share"}, {}};
  Table status_table = workload_table;
  Table dist_table{{"scope", "metric", "group", "count", "mean", "median", "p5", "p95", "p99", "excluded"}, {}};

  std::vector<std::pair<std::string, std::vector<trace::JobRecord>>> scopes;
  scopes.emplace_back("all", gpu_jobs);
  for (const auto& c : clusters) {
    std::vector<trace::JobRecord> subset;
    std::copy_if(gpu_jobs.begin(), gpu_jobs.end(), std::back_inserter(subset),
                 [&](const trace::JobRecord& r) { return r.cluster.name() == c; });
    scopes.emplace_back(c, std::move(subset));
  }

  Json scopes_json = Json::object();
  for (const auto& [scope, jobs] : scopes) {
    Json sj;
    sj["gpu_jobs"] = jobs.size();
    const auto workloads = analytics::workload_breakdown(jobs);
    const auto statuses = analytics::final_status_breakdown(jobs);
    sj["workload_breakdown"] = breakdown_json(workloads);
    sj["status_breakdown"] = breakdown_json(statuses);
    add_breakdown(workload_table, scope, workloads);
    add_breakdown(status_table, scope, statuses);

    Json metrics = Json::object();
    for (const auto metric : kMetrics) {
      const std::string mname(analytics::to_string(metric));
      Json mj;
      const auto overall = analytics::distribution_stats(jobs, metric);
      const auto by_workload = analytics::distribution_stats(jobs, metric, analytics::GroupBy::kWorkload);
      mj["excluded"] = overall.excluded;
      Json groups = Json::object();
      auto record = [&](const std::string& group, const analytics::DistributionSummary& s, std::size_t excluded) {
        groups[group] = summary_json(s);
        dist_table.rows.push_back({scope, mname, group, std::to_string(s.count), format_double(s.mean),
                                   format_double(s.median), format_double(s.p5), format_double(s.p95),
                                   format_double(s.p99), std::to_string(excluded)});
        report::PlotData plot{mname, "cdf", {}};
        for (const auto& p : s.cdf_points) plot.points.emplace_back(p.value, p.fraction);
        rep.plots["cdf_" + mname + "_" + slug(scope) + "_" + slug(group)] = std::move(plot);
      };
      if (const auto it = overall.groups.find("all"); it != overall.groups.end()) {
        record("all", it->second, overall.excluded);
      }
      for (const auto& [group, s] : by_workload.groups) record(group, s, 0);
      mj["groups"] = groups;
      metrics[mname] = mj;
    }
    sj["distributions"] = metrics;
    scopes_json[scope] = sj;
  }
  rep.results["scopes"] = scopes_json;

  if (rc.kv.has("analyze.energy_mwh")) {
    const double energy = rc.kv.get_double("analyze.energy_mwh", 0);
    const double rate = rc.kv.get_double("analyze.carbon_rate", analytics::kAcmeCarbonRate);
    Json carbon;
    carbon["energy_mwh"] = energy;
    carbon["rate_tco2e_per_mwh"] = rate;
    carbon["tco2e"] = analytics::carbon_estimate(energy, rate);
    rep.results["carbon"] = carbon;
  }

  Table rejects{{"line", "reason", "detail"}, {}};
  for (const auto& r : parsed.rejects) rejects.rows.push_back({std::to_string(r.line), r.reason, r.detail});
  rep.tables["workload_breakdown"] = std::move(workload_table);
  rep.tables["status_breakdown"] = std::move(status_table);
  rep.tables["distribution_summary"] = std::move(dist_table);
  rep.tables["rejects"] = std::move(rejects);

  summary << "analyze: " << parsed.records.size() << " records (" << gpu_jobs.size() << " GPU, " << cpu_jobs
          << " CPU), " << parsed.rejects.size() << " rejects\n";
  for (const auto& [scope, jobs] : scopes) {
    const auto d = analytics::distribution_stats(jobs, analytics::Metric::kDuration);
    const auto it = d.groups.find("all");
    summary << "  " << scope << ": " << jobs.size() << " GPU jobs, median duration "
            << (it == d.groups.end() ? std::string("-") : format_double(it->second.median)) << " s\n";
  }
  return rep;
}

}  // namespace acme::cli
