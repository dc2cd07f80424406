#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "acme/analytics/breakdown.hpp"
#include "acme/analytics/stats.hpp"
#include "acme/common/error.hpp"
#include "acme/common/rng.hpp"

namespace acme::analytics {
namespace {

using trace::FinalStatus;
using trace::JobRecord;
using trace::WorkloadType;

JobRecord job(WorkloadType w, std::int64_t gpus, trace::Seconds duration,
              FinalStatus st = FinalStatus::kCompleted, trace::Seconds delay = 0,
              const char* cluster = "Kalos") {
  JobRecord r;
  r.job_id = "j";
  r.cluster = trace::ClusterId::parse(cluster);
  r.workload = w;
  r.gpu_num = gpus;
  r.submit_time = 100;
  r.start_time = 100 + delay;
  r.end_time = 100 + delay + duration;
  r.state = st;
  return r;
}

const BreakdownRow& row(const std::vector<BreakdownRow>& rows, std::string_view g) {
  return *std::find_if(rows.begin(), rows.end(), [&](const BreakdownRow& r) { return r.group == g; });
}

TEST(Summarize, ThreeElementMedian) {
  const auto s = summarize({180, 60, 120});
  EXPECT_EQ(s.count, 3u);
  EXPECT_EQ(s.median, 120);
  EXPECT_EQ(s.mean, 120);
  ASSERT_EQ(s.cdf_points.size(), 3u);
  EXPECT_EQ(s.cdf_points[0].value, 60);
  EXPECT_NEAR(s.cdf_points[0].fraction, 1.0 / 3, 1e-15);
  EXPECT_EQ(s.cdf_points[2].fraction, 1.0);
}

TEST(Summarize, CdfHasOnePointPerDistinctValue) {
  const auto s = summarize({5, 5, 1, 5, 2});
  ASSERT_EQ(s.cdf_points.size(), 3u);
  EXPECT_EQ(s.cdf_points[0], (CdfPoint{1, 0.2}));
  EXPECT_EQ(s.cdf_points[1], (CdfPoint{2, 0.4}));
  EXPECT_EQ(s.cdf_points[2], (CdfPoint{5, 1.0}));
}

TEST(Summarize, EmptyInput) {
  const auto s = summarize({});
  EXPECT_EQ(s.count, 0u);
  EXPECT_TRUE(s.cdf_points.empty());
}

TEST(LowerQuantile, IndexRule) {
  const std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  EXPECT_EQ(lower_quantile(v, 0.5), 5);  // floor(0.5 * 9) = 4
  EXPECT_EQ(lower_quantile(v, 0.95), 9);
  EXPECT_EQ(lower_quantile(v, 0.0), 1);
  EXPECT_EQ(lower_quantile(v, 1.0), 10);
}

TEST(DistributionStats, GroupsAndExclusions) {
  std::vector<JobRecord> recs{job(WorkloadType::kEvaluation, 1, 60), job(WorkloadType::kEvaluation, 1, 180),
                              job(WorkloadType::kPretraining, 64, 6000)};
  JobRecord never = job(WorkloadType::kDebug, 1, 10);
  never.start_time.reset();
  never.end_time.reset();
  recs.push_back(never);
  const auto st = distribution_stats(recs, Metric::kDuration, GroupBy::kWorkload);
  EXPECT_EQ(st.excluded, 1u);
  EXPECT_FALSE(st.groups.count("all"));
  EXPECT_EQ(distribution_stats(recs, Metric::kDuration).groups.at("all").count, 3u);
  EXPECT_EQ(st.groups.at("Evaluation").median, 60);
  EXPECT_EQ(st.groups.at("Pretraining").median, 6000);
  // GPU demand is defined for jobs that never ran.
  EXPECT_EQ(distribution_stats(recs, Metric::kGpuDemand).excluded, 0u);
}

TEST(DistributionStats, PermutationInvariant) {
  Rng rng(8);
  std::vector<JobRecord> recs;
  for (int i = 0; i < 300; ++i) {
    recs.push_back(job(trace::kAllWorkloads[rng.below(6)], 1 + static_cast<std::int64_t>(rng.below(64)),
                       static_cast<trace::Seconds>(rng.below(5000)), FinalStatus::kCompleted,
                       static_cast<trace::Seconds>(rng.below(900)), rng.below(2) ? "Kalos" : "Seren"));
  }
  for (const auto metric : {Metric::kDuration, Metric::kQueuingDelay, Metric::kGpuDemand}) {
    for (const auto by : {GroupBy::kNone, GroupBy::kWorkload, GroupBy::kCluster}) {
      const auto base = distribution_stats(recs, metric, by);
      auto shuffled = recs;
      for (std::size_t i = shuffled.size() - 1; i > 0; --i) std::swap(shuffled[i], shuffled[rng.below(i + 1)]);
      const auto again = distribution_stats(shuffled, metric, by);
      ASSERT_EQ(base.groups, again.groups);
      ASSERT_EQ(base.excluded, again.excluded);
    }
  }
}

TEST(WorkloadBreakdown, SinglePretrainingJob) {
  const auto rows = workload_breakdown({job(WorkloadType::kPretraining, 8, 100)});
  EXPECT_EQ(rows.size(), 6u);
  EXPECT_EQ(row(rows, "Pretraining").count_share, 1.0);
  EXPECT_EQ(row(rows, "Pretraining").gpu_time_share, 1.0);
  EXPECT_EQ(row(rows, "Evaluation").count, 0u);
}

TEST(WorkloadBreakdown, TwoJobHandComputation) {
  const auto rows =
      workload_breakdown({job(WorkloadType::kEvaluation, 1, 600), job(WorkloadType::kPretraining, 8, 6000)});
  EXPECT_DOUBLE_EQ(row(rows, "Evaluation").gpu_time_share, 10.0 / 810.0);
  EXPECT_DOUBLE_EQ(row(rows, "Pretraining").gpu_time_share, 800.0 / 810.0);
  EXPECT_EQ(row(rows, "Evaluation").count_share, 0.5);
}

TEST(StatusBreakdown, AllCompleted) {
  const auto rows = final_status_breakdown({job(WorkloadType::kSft, 2, 10), job(WorkloadType::kSft, 4, 20)});
  EXPECT_EQ(row(rows, "Completed").count_share, 1.0);
  EXPECT_EQ(row(rows, "Completed").gpu_time_share, 1.0);
  EXPECT_EQ(row(rows, "Failed").count_share, 0.0);
}

TEST(StatusBreakdown, ThreeJobHandComputation) {
  // GPU time: 1 x 100, 2 x 50, 4 x 200 = 100, 100, 800.
  const auto rows = final_status_breakdown({job(WorkloadType::kSft, 1, 100, FinalStatus::kCompleted),
                                            job(WorkloadType::kSft, 2, 50, FinalStatus::kFailed),
                                            job(WorkloadType::kSft, 4, 200, FinalStatus::kCanceled)});
  EXPECT_DOUBLE_EQ(row(rows, "Completed").gpu_time_share, 0.1);
  EXPECT_DOUBLE_EQ(row(rows, "Failed").gpu_time_share, 0.1);
  EXPECT_DOUBLE_EQ(row(rows, "Canceled").gpu_time_share, 0.8);
  EXPECT_DOUBLE_EQ(row(rows, "Failed").count_share, 1.0 / 3.0);
}

TEST(Breakdown, ZeroGpuTimeGivesZeroShares) {
  JobRecord never = job(WorkloadType::kEvaluation, 1, 0);
  const auto rows = workload_breakdown({never});
  for (const auto& r : rows) EXPECT_EQ(r.gpu_time_share, 0.0);
  EXPECT_EQ(row(rows, "Evaluation").count_share, 1.0);
}

TEST(Breakdown, SharesSumToOneAndEvaluationCrossCheck) {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<JobRecord> recs;
    const int n = 1 + static_cast<int>(rng.below(80));
    for (int i = 0; i < n; ++i) {
      recs.push_back(job(trace::kAllWorkloads[rng.below(6)], 1 + static_cast<std::int64_t>(rng.below(32)),
                         1 + static_cast<trace::Seconds>(rng.below(10000)), trace::kAllStatuses[rng.below(3)]));
    }
    for (const auto& rows : {workload_breakdown(recs), final_status_breakdown(recs)}) {
      double c = 0, g = 0;
      for (const auto& r : rows) {
        c += r.count_share;
        g += r.gpu_time_share;
      }
      ASSERT_NEAR(c, 1.0, 1e-9);
      ASSERT_NEAR(g, 1.0, 1e-9);
    }
    const auto rows = workload_breakdown(recs);
    const auto& ev = row(rows, "Evaluation");
    double total = 0;
    for (const auto& r : rows) total += r.gpu_time;
    if (ev.count > 0 && ev.gpu_time / ev.count < total / n) {
      ASSERT_LE(ev.gpu_time_share, ev.count_share);
    }
  }
}

TEST(Carbon, Examples) {
  EXPECT_NEAR(carbon_estimate(673, kAcmeCarbonRate), 321.7, 0.1);
  EXPECT_EQ(carbon_estimate(0, 0.478), 0.0);
  EXPECT_DOUBLE_EQ(carbon_estimate(100, 0.5), 50.0);
  EXPECT_THROW(carbon_estimate(-1, 0.5), Error);
}

}  // namespace
}  // namespace acme::analytics
