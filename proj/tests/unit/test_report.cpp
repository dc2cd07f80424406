#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "acme/common/error.hpp"
#include "acme/diag/filter.hpp"
#include "acme/diag/pipeline.hpp"
#include "acme/diag/reason_rules.hpp"
#include "acme/eval/dataset.hpp"
#include "acme/ft/failure_model.hpp"
#include "acme/report/report.hpp"
#include "acme/report/serialize.hpp"
#include "acme/sched/replay.hpp"
#include "test_support.hpp"

namespace acme::report {
namespace {

namespace fs = std::filesystem;

template <typename T>
void expect_round_trip(const T& value) {
  const Json j = encode(value);
  EXPECT_EQ(decode_as<T>(j), value);
  // Through text as well, since report.json is what gets read back.
  EXPECT_EQ(decode_as<T>(Json::parse(j.dump())), value);
}

TEST(Serialize, AnalyticsTypes) {
  expect_round_trip(analytics::summarize({0.1, 3, 3, 1e-7, 123456.789}));
  expect_round_trip(analytics::BreakdownRow{"pretraining", 7, 1.5e9, 1.0 / 3, 0.94});
}

TEST(Serialize, FaultToleranceTypes) {
  ft::CheckpointConfig cp;
  expect_round_trip(ft::checkpoint_overhead(cp, ft::CheckpointMode::kAsync, 24 * 60));

  ft::CampaignConfig cfg;
  cfg.seed = 3;
  const auto model = ft::FailureModel::load(testing::data_dir() / "failure_model.csv");
  expect_round_trip(ft::run_campaign(ft::incident_trace(model, cfg), cfg));

  const std::vector<ft::NodeId> nodes{0, 1, 2, 3, 4, 5, 6};
  expect_round_trip(ft::two_round_detect(nodes, ft::make_set_oracle({2, 3})));

  ft::RecoveryAction a;
  a.kind = ft::RecoveryAction::Kind::kRollbackEarlierAndSkipBatches;
  a.checkpoint_id = 4;
  a.skip_count = 1800;
  a.nodes = {1, 9};
  a.unresolved = {7};
  expect_round_trip(a);
}

TEST(Serialize, SchedulerTypes) {
  const auto jobs = sched::synthetic_mixed_workload(2, 4, 2 * 3600);
  sched::ReplayOptions o;
  o.quota.reserved_nodes = 2;
  const auto r = sched::replay_schedule(jobs, 4, 8, o);
  ASSERT_FALSE(r.outcomes.empty());
  expect_round_trip(r.outcomes.front());
  expect_round_trip(r);
}

TEST(Serialize, EvalTypes) {
  const auto d = eval::synthetic_eval_workload(5, 20);
  const eval::LoadModel load;
  const auto r = eval::simulate_eval(eval::plan_trials(d, 8, 1, eval::EvalMode::kDecoupled, load), load);
  expect_round_trip(r.timeline.gpu_phases[0][0]);
  expect_round_trip(r.timeline);
  expect_round_trip(r);
}

TEST(Serialize, DiagnosisTypes) {
  diag::Diagnoser d(diag::default_filter_rules(), diag::ReasonRuleTable::defaults(),
                    diag::ValidationCorpus::load(testing::data_dir() / "diag" / "error_lines.txt"));
  const auto rep = d.diagnose(testing::read_file(testing::data_dir() / "diag" / "corpus" / "multi_error.log"));
  expect_round_trip(rep.result);
  expect_round_trip(rep);
}

TEST(Serialize, MalformedInputIsDataError) {
  ft::CheckpointOverhead v;
  try {
    decode(Json::parse(R"({"blocked_seconds": "x"})"), v);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kData);
  }
  EXPECT_THROW(decode_as<eval::Phase>(Json::array()), Error);
}

TEST(Serialize, HashHex) {
  EXPECT_EQ(hash_hex(0xcbf29ce484222325ULL), "cbf29ce484222325");
  EXPECT_EQ(hash_hex(1), "0000000000000001");
  EXPECT_EQ(parse_hash_hex("cbf29ce484222325"), 0xcbf29ce484222325ULL);
  EXPECT_THROW(parse_hash_hex("xyz"), Error);
}

TEST(Timeline, TableReproducesPlanExactly) {
  const eval::LoadModel load;
  for (auto mode : {eval::EvalMode::kBaseline, eval::EvalMode::kDecoupled}) {
    const auto plan = eval::plan_trials(eval::synthetic_eval_workload(7), 16, 2, mode, load);
    const auto sim = eval::simulate_eval(plan, load).timeline;
    const auto back = timeline_to_plan(timeline_table(sim), sim.mode, sim.nodes, sim.gpus_per_node, sim.gpus(),
                                       sim.packing);
    EXPECT_EQ(back, sim);
  }
}

Report sample_report() {
  Report r;
  r.command = "analyze";
  r.seed = 42;
  r.config = {{"seed", "42"}, {"trace.path", "x.csv"}};
  r.results["median"] = 0.1;
  r.results["nested"] = Json{{"b", 1}, {"a", 2}};
  r.tables["t"] = Table{{"group", "share"}, {{"a,b", "0.5"}, {"c\"d", "1"}}};
  r.plots["cdf"] = PlotData{"duration_s", "fraction", {{1, 0.25}, {2.5, 1}}};
  return r;
}

TEST(ReportJson, EmptySkeleton) {
  Report r;
  r.command = "diagnose";
  const Json j = r.to_json();
  EXPECT_EQ(j.at("schema_version"), 1);
  EXPECT_EQ(j.at("command"), "diagnose");
  const auto back = Report::from_json(j);
  EXPECT_EQ(back.command, "diagnose");
  EXPECT_FALSE(back.seed.has_value());
  EXPECT_EQ(r.dump().back(), '\n');
}

TEST(ReportJson, WrongSchemaVersionRejected) {
  Json j = sample_report().to_json();
  j["schema_version"] = 2;
  EXPECT_THROW(Report::from_json(j), Error);
}

TEST(ReportFiles, EmitAndLoadRoundTrip) {
  testing::TempDir tmp;
  const auto r = sample_report();
  emit_report(r, tmp / "out");
  EXPECT_TRUE(fs::exists(tmp / "out" / "report.json"));
  EXPECT_TRUE(fs::exists(tmp / "out" / "t.csv"));
  EXPECT_TRUE(fs::exists(tmp / "out" / "cdf.dat"));
  const auto back = load_report(tmp / "out");
  EXPECT_EQ(back.command, r.command);
  EXPECT_EQ(back.seed, r.seed);
  EXPECT_EQ(back.config, r.config);
  EXPECT_EQ(back.results, r.results);
  EXPECT_EQ(back.tables, r.tables);
  EXPECT_EQ(back.plots, r.plots);
  // Rewriting the same report gives the same bytes.
  emit_report(back, tmp / "again");
  EXPECT_EQ(testing::read_file(tmp / "out" / "report.json"), testing::read_file(tmp / "again" / "report.json"));
}

TEST(ReportFiles, UnwritableTargetLeavesNothing) {
  testing::TempDir tmp;
  testing::write_file(tmp / "blocker", "file, not a directory\n");
  try {
    emit_report(sample_report(), tmp / "blocker" / "out");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
  EXPECT_FALSE(fs::exists(tmp / "blocker" / "out"));
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(tmp.path())) ++entries;
  EXPECT_EQ(entries, 1u);
}

TEST(ReportFiles, TableAndPlotStreams) {
  const Table t{{"a", "b"}, {{"1", "x,y"}, {"", "q\"uote"}}};
  std::stringstream ts;
  write_table(ts, t);
  EXPECT_EQ(read_table(ts), t);

  const PlotData p{"x", "y", {{0.1, 1e-9}, {3, 4}}};
  std::stringstream ps;
  write_plot(ps, p);
  EXPECT_EQ(read_plot(ps), p);
}

}  // namespace
}  // namespace acme::report
