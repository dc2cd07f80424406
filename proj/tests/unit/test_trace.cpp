#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "acme/analytics/breakdown.hpp"
#include "acme/common/error.hpp"
#include "acme/common/kv_config.hpp"
#include "acme/common/rng.hpp"
#include "acme/trace/classify.hpp"
#include "acme/trace/synthetic.hpp"
#include "acme/trace/trace_io.hpp"
#include "test_support.hpp"

namespace acme::trace {
namespace {

const char* kHeader = "job_id,cluster,workload,submit_time,start_time,end_time,gpu_num,cpu_num,node_num,state,name\n";

ParseResult parse(const std::string& text, const ColumnMap& map = ColumnMap::identity()) {
  std::istringstream in(text);
  return parse_trace(in, map);
}

TEST(ParseTrace, ThreeRowsIdentityMapping) {
  const auto r = parse(std::string(kHeader) +
                       "j1,Kalos,,0,10,70,8,16,1,COMPLETED,pretrain_7b\n"
                       "j2,Seren,Evaluation,5,5,65,1,4,1,FAILED,x\n"
                       "j3,Seren,,7,,,0,2,1,CANCELLED,\n");
  EXPECT_EQ(r.records.size(), 3u);
  EXPECT_TRUE(r.rejects.empty());
  EXPECT_EQ(r.data_rows, 3u);
  EXPECT_EQ(r.records[0].workload, WorkloadType::kPretraining);
  EXPECT_EQ(r.records[0].duration(), 60);
  EXPECT_EQ(r.records[0].queuing_delay(), 10);
  EXPECT_EQ(r.records[0].gpu_time(), 480.0);
  EXPECT_EQ(r.records[1].workload, WorkloadType::kEvaluation);
  EXPECT_EQ(r.records[1].state, FinalStatus::kFailed);
  EXPECT_FALSE(r.records[2].started());
  EXPECT_FALSE(r.records[2].is_gpu_job());
  EXPECT_EQ(r.records[2].gpu_time(), 0.0);
  EXPECT_EQ(r.records[2].state, FinalStatus::kCanceled);
}

TEST(ParseTrace, NegativeDurationIsRejected) {
  const auto r = parse(std::string(kHeader) +
                       "j1,Kalos,,0,10,70,8,16,1,COMPLETED,a\n"
                       "j2,Kalos,,0,50,40,8,16,1,COMPLETED,b\n"
                       "j3,Kalos,,0,10,20,8,16,1,COMPLETED,c\n");
  EXPECT_EQ(r.records.size(), 2u);
  ASSERT_EQ(r.rejects.size(), 1u);
  EXPECT_EQ(r.rejects[0].reason, "negative_duration");
  EXPECT_EQ(r.rejects[0].line, 3u);
}

TEST(ParseTrace, OtherRejectReasons) {
  const auto r = parse(std::string(kHeader) +
                       "j1,Kalos,,0,10,70,8,16,1,COMPLETED\n"
                       ",Kalos,,0,10,70,8,16,1,COMPLETED,a\n"
                       "j3,Kalos,,0,10,70,x,16,1,COMPLETED,a\n"
                       "j4,Kalos,,0,10,70,8,16,1,EXPLODED,a\n"
                       "j5,Kalos,,20,10,70,8,16,1,COMPLETED,a\n"
                       "j6,Kalos,,0,10,,8,16,1,COMPLETED,a\n");
  std::vector<std::string> reasons;
  for (const auto& rej : r.rejects) reasons.push_back(rej.reason);
  EXPECT_EQ(reasons, (std::vector<std::string>{"wrong_field_count", "missing_value", "bad_integer", "bad_state",
                                               "negative_queuing_delay", "missing_end"}));
  EXPECT_TRUE(r.records.empty());
}

TEST(ParseTrace, MissingMappedColumnIsADataError) {
  try {
    parse("job_id,cluster\nj1,Kalos\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kData);
  }
}

TEST(ParseTrace, ColumnMapAdaptsForeignSchema) {
  const auto cfg = KvConfig::parse(
      "trace.column.job_id = JobID\ntrace.column.submit_time = Submit\ntrace.column.start_time = Start\n"
      "trace.column.end_time = End\ntrace.column.gpu_num = GPUs\ntrace.column.state = State\n"
      "trace.column.name = JobName\ntrace.time_unit = iso8601\n");
  auto map = ColumnMap::from_config(cfg);
  map.unmap("cluster");
  map.unmap("workload");
  map.unmap("cpu_num");
  map.unmap("node_num");
  map.default_cluster = "Kalos";
  const auto r = parse(
      "JobID,Submit,Start,End,GPUs,State,JobName\n"
      "a,2023-07-01 00:00:00,2023-07-01T00:01:00Z,2023-07-01 00:03:30.5,2,COMPLETED,mmlu_eval\n",
      map);
  ASSERT_EQ(r.records.size(), 1u) << (r.rejects.empty() ? "" : r.rejects[0].detail);
  EXPECT_EQ(r.records[0].cluster.name(), "Kalos");
  EXPECT_EQ(r.records[0].duration(), 150);
  EXPECT_EQ(r.records[0].workload, WorkloadType::kEvaluation);
}

TEST(ParseTrace, MillisecondTimestamps) {
  auto map = ColumnMap::identity();
  map.time_unit = TimeUnit::kMilliseconds;
  const auto r = parse(std::string(kHeader) + "j,Seren,,1000,3000,63000,1,1,1,COMPLETED,x\n", map);
  ASSERT_EQ(r.records.size(), 1u);
  EXPECT_EQ(r.records[0].submit_time, 1);
  EXPECT_EQ(r.records[0].duration(), 60);
}

TEST(ParseIso8601, KnownInstants) {
  EXPECT_EQ(parse_iso8601("1970-01-01 00:00:00"), 0);
  EXPECT_EQ(parse_iso8601("2023-07-01T00:00:00Z"), 1688169600);
  EXPECT_EQ(parse_iso8601("2000-03-01 12:00:00"), 951912000);
  EXPECT_FALSE(parse_iso8601("2023-13-01 00:00:00").has_value());
  EXPECT_FALSE(parse_iso8601("yesterday").has_value());
}

TEST(ParseTrace, LosslessAndRoundTrips) {
  // Property: every data row is either a record or a reject, and canonical
  // CSV re-parses to identical records.
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    std::string text = kHeader;
    const int rows = 1 + static_cast<int>(rng.below(40));
    for (int i = 0; i < rows; ++i) {
      const long long submit = static_cast<long long>(rng.below(1000));
      const long long start = submit + static_cast<long long>(rng.below(100)) - 10;
      const long long end = start + static_cast<long long>(rng.below(500)) - 20;
      const char* states[] = {"COMPLETED", "FAILED", "CANCELLED", "NODE_FAIL", "weird"};
      text += "j" + std::to_string(i) + ",Seren,," + std::to_string(submit) + "," + std::to_string(start) + "," +
              std::to_string(end) + "," + std::to_string(rng.below(9)) + ",4,1," + states[rng.below(5)] +
              ",\"name, " + std::to_string(i) + "\"\n";
    }
    const auto r = parse(text);
    ASSERT_EQ(r.records.size() + r.rejects.size(), r.data_rows);
    ASSERT_EQ(r.data_rows, static_cast<std::size_t>(rows));
    std::ostringstream out;
    write_trace(out, r.records);
    const auto again = parse(out.str());
    ASSERT_TRUE(again.rejects.empty());
    ASSERT_EQ(again.records, r.records);
  }
}

TEST(Classify, KeywordExamples) {
  EXPECT_EQ(classify_workload("pretrain_123b_v2", 1024, std::nullopt), WorkloadType::kPretraining);
  EXPECT_EQ(classify_workload("humaneval_ckpt_1200", 1, std::nullopt), WorkloadType::kEvaluation);
  EXPECT_EQ(classify_workload("job_8f3a", 4, std::nullopt), WorkloadType::kOther);
  EXPECT_EQ(classify_workload("SFT-chat", 8, std::nullopt), WorkloadType::kSft);
  EXPECT_EQ(classify_workload("unit_test", 1, std::nullopt), WorkloadType::kDebug);
}

TEST(Classify, ExplicitLabelWins) {
  EXPECT_EQ(classify_workload("pretrain_7b", 8, WorkloadType::kDebug), WorkloadType::kDebug);
}

TEST(Classify, FirstMatchingRuleWinsAndGpuFloorApplies) {
  const auto table = KeywordTable::parse("# c\nbig\tPretraining\t64\nbig\tSFT\neval\tEvaluation\n");
  ASSERT_EQ(table.rules().size(), 3u);
  EXPECT_EQ(classify_workload("big_eval", 128, std::nullopt, table), WorkloadType::kPretraining);
  EXPECT_EQ(classify_workload("big_eval", 8, std::nullopt, table), WorkloadType::kSft);
  EXPECT_EQ(classify_workload("my_eval", 8, std::nullopt, table), WorkloadType::kEvaluation);
  // Deterministic across calls.
  for (int i = 0; i < 10; ++i) EXPECT_EQ(classify_workload("big_eval", 8, std::nullopt, table), WorkloadType::kSft);
}

TEST(Classify, ShippedKeywordFileMatchesDefaults) {
  const auto file = KeywordTable::load(testing::data_dir() / "workload_keywords.tsv");
  const auto& def = KeywordTable::defaults();
  ASSERT_EQ(file.rules().size(), def.rules().size());
  for (std::size_t i = 0; i < def.rules().size(); ++i) {
    EXPECT_EQ(file.rules()[i].keyword, def.rules()[i].keyword);
    EXPECT_EQ(file.rules()[i].workload, def.rules()[i].workload);
  }
}

TEST(Enums, ParseAliases) {
  EXPECT_EQ(parse_workload("pretrain"), WorkloadType::kPretraining);
  EXPECT_EQ(parse_workload("EVAL"), WorkloadType::kEvaluation);
  EXPECT_EQ(parse_status("NODE_FAIL"), FinalStatus::kFailed);
  EXPECT_EQ(parse_status("TIMEOUT"), FinalStatus::kFailed);
  EXPECT_EQ(parse_status("cancelled"), FinalStatus::kCanceled);
  EXPECT_FALSE(parse_status("RUNNING?").has_value());
  EXPECT_TRUE(ClusterId::parse("kalos").is_kalos());
  EXPECT_EQ(ClusterId::parse("Venus").name(), "Venus");
}

TEST(Synthetic, DeterministicAndSorted) {
  const auto spec = SyntheticClusterSpec::kalos_like(2000);
  const auto a = synthetic_trace(spec, 1);
  const auto b = synthetic_trace(spec, 1);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, synthetic_trace(spec, 2));
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end(),
                             [](const JobRecord& x, const JobRecord& y) { return x.submit_time < y.submit_time; }));
  EXPECT_EQ(a.size(), 2000u + spec.cpu_jobs);
}

TEST(Synthetic, HitsItsShareTargets) {
  for (const auto& spec : {SyntheticClusterSpec::kalos_like(5000), SyntheticClusterSpec::seren_like(8000)}) {
    auto recs = synthetic_trace(spec, 2024);
    std::erase_if(recs, [](const JobRecord& r) { return !r.is_gpu_job(); });
    ASSERT_EQ(recs.size(), spec.jobs);
    const auto w = analytics::workload_breakdown(recs);
    const auto s = analytics::final_status_breakdown(recs);
    auto row = [](const auto& rows, std::string_view g) {
      return *std::find_if(rows.begin(), rows.end(), [&](const auto& r) { return r.group == g; });
    };
    EXPECT_NEAR(row(w, "Pretraining").count_share, spec.pretrain_count_share, 1e-3) << spec.cluster;
    EXPECT_NEAR(row(w, "Pretraining").gpu_time_share, spec.pretrain_gpu_time_share, 1e-3) << spec.cluster;
    EXPECT_NEAR(row(w, "Evaluation").count_share, spec.eval_count_share, 1e-3) << spec.cluster;
    EXPECT_NEAR(row(w, "Evaluation").gpu_time_share, spec.eval_gpu_time_share, 1e-3) << spec.cluster;
    EXPECT_NEAR(row(s, "Failed").count_share, spec.failed_count_share, 1e-3) << spec.cluster;
    EXPECT_NEAR(row(s, "Completed").gpu_time_share, spec.completed_gpu_time_share, 1e-3) << spec.cluster;
  }
}

}  // namespace
}  // namespace acme::trace
