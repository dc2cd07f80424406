#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "acme/common/csv.hpp"
#include "acme/common/digest.hpp"
#include "acme/common/error.hpp"
#include "acme/common/rng.hpp"
#include "acme/diag/agent.hpp"
#include "acme/diag/embedding.hpp"
#include "acme/diag/filter.hpp"
#include "acme/diag/pipeline.hpp"
#include "acme/diag/reason_rules.hpp"
#include "test_support.hpp"

namespace acme::diag {
namespace {

using nlohmann::json;

std::filesystem::path diag_dir() { return testing::data_dir() / "diag"; }

std::vector<std::vector<std::string>> read_labels(const std::filesystem::path& p) {
  std::ifstream in(p);
  csv::Reader r(in);
  csv::Row row;
  std::vector<std::vector<std::string>> out;
  r.next(row);  // header
  while (r.next(row)) out.push_back(row);
  return out;
}

ValidationCorpus shipped_corpus() { return ValidationCorpus::load(diag_dir() / "error_lines.txt"); }

AgentResponse reply(std::vector<json> completions) {
  AgentResponse r;
  r.completions = std::move(completions);
  return r;
}

// ---- taxonomy and rules ----

TEST(Taxonomy, TwentyNineReasonsInThreeCategories) {
  const auto& t = reason_taxonomy();
  ASSERT_EQ(t.size(), 29u);
  std::map<Category, int> per;
  for (const auto& r : t) ++per[r.category];
  EXPECT_EQ(per[Category::kInfrastructure], 9);
  EXPECT_EQ(per[Category::kFramework], 9);
  EXPECT_EQ(per[Category::kScript], 11);
  EXPECT_EQ(find_reason("Key Error")->origin, Origin::kUser);
  EXPECT_EQ(find_reason("ECC Error")->origin, Origin::kInfrastructure);
  EXPECT_EQ(find_reason("nonexistent"), nullptr);
}

TEST(ReasonRules, ShippedFileMatchesDefaultsAndCoversEveryReason) {
  const auto file = ReasonRuleTable::load(diag_dir() / "reason_rules.tsv");
  EXPECT_TRUE(file.rejected().empty());
  EXPECT_EQ(testing::read_file(diag_dir() / "reason_rules.tsv"), ReasonRuleTable::default_text());
  std::set<std::string> covered;
  for (const auto& r : file.rules()) {
    covered.insert(r.reason);
    EXPECT_GT(r.priority, category_band(r.category)) << r.reason;
    EXPECT_LT(r.priority, category_band(r.category) + 100) << r.reason;
  }
  for (const auto& info : reason_taxonomy()) EXPECT_TRUE(covered.count(std::string(info.name))) << info.name;
}

TEST(ReasonRules, EccLine) {
  const auto d = rule_diagnose({"step 1", "RuntimeError: uncorrectable ECC error encountered"},
                               ReasonRuleTable::defaults());
  ASSERT_TRUE(d.has_value());
  EXPECT_EQ(d->reason, "ECC Error");
  EXPECT_EQ(d->category, Category::kInfrastructure);
  EXPECT_EQ(d->evidence_lines, (std::vector<std::size_t>{1}));
  EXPECT_TRUE(d->well_formed());
}

TEST(ReasonRules, NoMatchIsAbsent) {
  EXPECT_FALSE(rule_diagnose({"all good", "training finished"}, ReasonRuleTable::defaults()).has_value());
  EXPECT_FALSE(rule_diagnose({}, ReasonRuleTable::defaults()).has_value());
}

TEST(ReasonRules, CudaErrorOutranksNcclTimeout) {
  const auto d = rule_diagnose({"[E ProcessGroupNCCL.cpp:475] Watchdog caught collective operation timeout: "
                                "WorkNCCL(SeqNum=1, OpType=ALLREDUCE, Timeout(ms)=1800000) ran for 1800002 "
                                "milliseconds before timing out.",
                                "RuntimeError: CUDA error: an illegal memory access was encountered"},
                               ReasonRuleTable::defaults());
  ASSERT_TRUE(d.has_value());
  EXPECT_EQ(d->reason, "CUDA Error");
}

TEST(ReasonRules, BandsOrderCategories) {
  ReasonRuleTable t;
  t.append(ReasonRule::make("boom", "Key Error", Category::kScript, Origin::kUser, Recoverable::kNo, 199));
  t.append(ReasonRule::make("boom", "Runtime Error", Category::kFramework, Origin::kUnknown, Recoverable::kYes, 200));
  EXPECT_EQ(rule_diagnose({"boom"}, t)->reason, "Runtime Error");
  ReasonRuleTable tie;
  tie.append(ReasonRule::make("x", "Key Error", Category::kScript, Origin::kUser, Recoverable::kNo, 150));
  tie.append(ReasonRule::make("x", "Index Error", Category::kScript, Origin::kUser, Recoverable::kNo, 150));
  EXPECT_EQ(rule_diagnose({"x"}, tie)->reason, "Key Error");
}

TEST(ReasonRules, ParseRejectsBadLinesAndRoundTrips) {
  std::istringstream in(
      "# comment\n"
      "ok pattern\tKey Error\tScript\tUser\tno\t150\tfix it\tshipped\n"
      "(unclosed\tKey Error\tScript\tUser\tno\t150\tfix\tshipped\n"
      "fine\tKey Error\tNotACategory\tUser\tno\t150\tfix\tshipped\n");
  const auto t = ReasonRuleTable::parse(in);
  EXPECT_EQ(t.size(), 1u);
  EXPECT_EQ(t.rejected().size(), 2u);
  std::ostringstream out;
  t.write(out);
  std::istringstream again(out.str());
  const auto t2 = ReasonRuleTable::parse(again);
  ASSERT_EQ(t2.size(), 1u);
  EXPECT_EQ(t2.rules()[0].pattern, "ok pattern");
  EXPECT_EQ(t2.rules()[0].mitigation, "fix it");
}

// ---- filters ----

TEST(Filter, StepLinesCollapseToTheError) {
  std::vector<std::string> lines;
  for (int i = 0; i < 1000; ++i) lines.push_back("step " + std::to_string(i) + " loss 2.31");
  lines.push_back("RuntimeError: CUDA error: misaligned address");
  const auto r = apply_filters(lines, {FilterRule("^step [0-9]+ loss ")});
  ASSERT_EQ(r.kept_lines.size(), 1u);
  EXPECT_EQ(r.kept_index[0], 1000u);
  EXPECT_EQ(r.hits, (std::vector<std::uint64_t>{1000}));
}

TEST(Filter, EmptyRulesetKeepsEverything) {
  const std::vector<std::string> lines{"a", "b", ""};
  EXPECT_EQ(apply_filters(lines, {}).kept_lines, lines);
}

TEST(Filter, Idempotent) {
  const auto rules = default_filter_rules();
  for (const auto& entry : std::filesystem::directory_iterator(diag_dir() / "corpus")) {
    if (entry.path().extension() != ".log") continue;
    const auto lines = split_lines(testing::read_file(entry.path()));
    const auto once = apply_filters(lines, rules).kept_lines;
    ASSERT_EQ(apply_filters(once, rules).kept_lines, once) << entry.path();
  }
}

TEST(Filter, BadPatternThrows) { EXPECT_THROW(FilterRule("(oops"), Error); }

TEST(FilterRuleFile, ValidationCorpusRejectsRulesThatHideErrors) {
  const ValidationCorpus corpus({"RuntimeError: CUDA error: out of memory", "KeyError: 'x'"});
  std::istringstream in("# c\n^INFO \tshipped\t3\nError\tlearned:run7\n[bad\tshipped\n");
  const auto f = FilterRuleFile::parse(in, &corpus);
  ASSERT_EQ(f.rules.size(), 1u);
  EXPECT_EQ(f.rules[0].hit_count(), 3u);
  ASSERT_EQ(f.rejected.size(), 2u);
  std::ostringstream out;
  write_filter_rules(out, f.rules);
  std::istringstream again(out.str());
  const auto g = FilterRuleFile::parse(again, &corpus);
  ASSERT_EQ(g.rules.size(), 1u);
  EXPECT_EQ(g.rules[0].pattern(), "^INFO ");
}

TEST(FilterRuleFile, ShippedFileLoadsCleanAgainstShippedCorpus) {
  const auto corpus = shipped_corpus();
  const auto f = FilterRuleFile::load(diag_dir() / "filter_rules.tsv", &corpus);
  EXPECT_TRUE(f.rejected.empty());
  EXPECT_EQ(f.rules.size(), default_filter_rules().size());
}

TEST(Segments, RespectByteBudget) {
  std::vector<std::string> lines{std::string(40, 'a'), std::string(40, 'b'), std::string(200, 'c'),
                                 std::string(10, 'd')};
  const auto segs = segment_lines(lines, 100);
  ASSERT_EQ(segs.size(), 3u);
  EXPECT_EQ(segs[0].begin, 0u);
  EXPECT_EQ(segs[0].end, 2u);
  EXPECT_EQ(segs[1].end, 3u);
  EXPECT_EQ(segs[2].end, 4u);
  EXPECT_EQ(split_lines("a\nb\r\nc"), (std::vector<std::string>{"a", "b", "c"}));
}

// ---- filter-rule proposals ----

TEST(Propose, UnanimousProposalAccepted) {
  FunctionAgentClient client([](const AgentRequest& req) {
    EXPECT_EQ(req.k, 3);
    return reply({json{{"rules", {"^tick "}}}, json{{"rules", {"^tick "}}}, json{{"rules", {"^tick "}}}});
  });
  const auto out = propose_rules({"tick 1", "tick 2"}, client, 3, ValidationCorpus{});
  ASSERT_EQ(out.accepted.size(), 1u);
  EXPECT_EQ(out.accepted[0].pattern(), "^tick ");
  EXPECT_EQ(out.accepted[0].provenance(), Provenance::kAgentLearned);
  EXPECT_EQ(client.calls(), 1u);
}

TEST(Propose, MajorityWinsMinorityDiscarded) {
  FunctionAgentClient client([](const AgentRequest&) {
    return reply({json{{"rules", {"^tick "}}}, json{{"rules", {"^tick ", "[0-9]"}}}, json{{"rules", {"^tock"}}}});
  });
  const auto out = propose_rules({"tick 1"}, client, 3, ValidationCorpus{});
  ASSERT_EQ(out.accepted.size(), 1u);
  EXPECT_EQ(out.accepted[0].pattern(), "^tick ");
  EXPECT_EQ(out.rejected.size(), 2u);
}

TEST(Propose, RuleMatchingAKnownErrorLineIsRejected) {
  FunctionAgentClient client([](const AgentRequest&) {
    return reply({json{{"rules", {"Error"}}}, json{{"rules", {"Error"}}}, json{{"rules", {"Error"}}}});
  });
  const auto out = propose_rules({"Error budget fine"}, client, 3, ValidationCorpus({"KeyError: 'x'"}));
  EXPECT_TRUE(out.accepted.empty());
  ASSERT_EQ(out.rejected.size(), 1u);
}

TEST(Propose, GuardProtectsDiagnosableLines) {
  FunctionAgentClient client([](const AgentRequest&) {
    return reply({json{{"rules", {"^\\[x\\]"}}}, json{{"rules", {"^\\[x\\]"}}}, json{{"rules", {"^\\[x\\]"}}}});
  });
  const auto table = ReasonRuleTable::defaults();
  const auto out = propose_rules({"[x] ok", "[x] RuntimeError: CUDA error: device-side assert triggered"}, client, 3,
                                 ValidationCorpus{}, "r", &table);
  EXPECT_TRUE(out.accepted.empty());
}

TEST(Propose, ClientFailureAcceptsNothing) {
  FunctionAgentClient client([](const AgentRequest&) -> AgentResponse { throw Error(ErrorCode::kAgent, "down"); });
  const auto out = propose_rules({"a"}, client, 3, ValidationCorpus{});
  EXPECT_TRUE(out.client_failed);
  EXPECT_TRUE(out.accepted.empty());
}

// ---- retrieval ----

TEST(Embedding, TokenizeAndCosine) {
  EXPECT_EQ(tokenize("CUDA error: out-of_memory 42!"),
            (std::vector<std::string>{"cuda", "error", "out", "of_memory", "42"}));
  EXPECT_DOUBLE_EQ(cosine({{"a", 1}}, {{"a", 2}}), 1.0);
  EXPECT_DOUBLE_EQ(cosine({{"a", 1}}, {{"b", 2}}), 0.0);
  EXPECT_DOUBLE_EQ(cosine({}, {{"b", 2}}), 0.0);
}

TEST(Retrieve, EmptyIndex) { EXPECT_TRUE(retrieve_similar("anything", EmbeddingIndex{}, 3).empty()); }

TEST(Retrieve, ExactDuplicateScoresOne) {
  EmbeddingIndex idx;
  idx.add("nccl timeout on rank 3", {});
  idx.add("cuda error illegal memory access", {});
  const auto m = retrieve_similar("cuda error illegal memory access", idx, 2);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0].document, 1u);
  EXPECT_NEAR(m[0].similarity, 1.0, 1e-12);
}

TEST(Retrieve, RankingMatchesHandComputedCosines) {
  const std::vector<std::string> docs{"cuda error cuda", "nccl timeout error", "key error missing key"};
  const std::string query = "cuda timeout";
  EmbeddingIndex idx;
  for (const auto& d : docs) idx.add(d, {});

  // Independent TF-IDF: raw counts x (ln((1+N)/(1+df)) + 1).
  std::vector<std::map<std::string, double>> tf(docs.size());
  std::map<std::string, int> df;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    std::istringstream s(docs[i]);
    for (std::string w; s >> w;) tf[i][w] += 1;
    for (const auto& [w, c] : tf[i]) ++df[w];
  }
  auto weigh = [&](const std::map<std::string, double>& counts) {
    std::map<std::string, double> v;
    for (const auto& [w, c] : counts) {
      const double d = df.count(w) ? df[w] : 0;
      v[w] = c * (std::log((1.0 + docs.size()) / (1.0 + d)) + 1.0);
    }
    return v;
  };
  auto cos = [](const std::map<std::string, double>& a, const std::map<std::string, double>& b) {
    double dot = 0, na = 0, nb = 0;
    for (const auto& [w, x] : a) {
      na += x * x;
      if (auto it = b.find(w); it != b.end()) dot += x * it->second;
    }
    for (const auto& [w, y] : b) nb += y * y;
    return dot / std::sqrt(na * nb);
  };
  const auto q = weigh({{"cuda", 1}, {"timeout", 1}});
  std::vector<std::pair<double, std::size_t>> expected;
  for (std::size_t i = 0; i < docs.size(); ++i) expected.emplace_back(cos(q, weigh(tf[i])), i);
  std::stable_sort(expected.begin(), expected.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

  const auto got = retrieve_similar(query, idx, 3);
  ASSERT_EQ(got.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(got[k].document, expected[k].second);
    EXPECT_NEAR(got[k].similarity, expected[k].first, 1e-12);
  }
}

// ---- agent diagnosis ----

json ecc_completion() {
  return json{{"reason", "ECC Error"},      {"category", "Infrastructure"}, {"origin", "Infrastructure"},
              {"recoverable", true},        {"mitigation", "cordon"},       {"evidence", json::array({1})},
              {"rule", "double bit error"}};
}

TEST(AgentDiagnose, CannedEccDiagnosis) {
  FunctionAgentClient client([](const AgentRequest&) { return reply({ecc_completion()}); });
  ReasonRuleTable table;
  EmbeddingIndex index;
  const auto a = agent_diagnose({"boot", "Xid 48: double bit error on GPU 3"}, {}, client, table, index, "run1");
  EXPECT_EQ(a.result.reason, "ECC Error");
  EXPECT_EQ(a.result.category, Category::kInfrastructure);
  EXPECT_EQ(a.result.recoverable, Recoverable::kYes);
  EXPECT_EQ(a.result.evidence_lines, (std::vector<std::size_t>{1}));
  ASSERT_EQ(table.size(), 1u);
  EXPECT_EQ(table.rules()[0].provenance, Provenance::kAgentLearned);
  EXPECT_EQ(table.rules()[0].priority, kInfrastructureBand);
  EXPECT_EQ(index.size(), 1u);
}

TEST(AgentDiagnose, MalformedOutputLeavesTableUnchanged) {
  for (const json& bad : {json("not an object"), json{{"reason", "X"}}, json{{"category", "Script"}},
                          json{{"reason", "X"}, {"category", "Bogus"}}}) {
    FunctionAgentClient client([&](const AgentRequest&) { return reply({bad}); });
    ReasonRuleTable table;
    EmbeddingIndex index;
    const auto a = agent_diagnose({"something"}, {}, client, table, index);
    EXPECT_FALSE(a.result.known());
    EXPECT_EQ(table.size(), 0u);
    EXPECT_EQ(index.size(), 0u);
  }
}

TEST(AgentDiagnose, RuleThatMatchesNothingIsNotLearned) {
  json c = ecc_completion();
  c["rule"] = "no such text";
  FunctionAgentClient client([&](const AgentRequest&) { return reply({c}); });
  ReasonRuleTable table;
  EmbeddingIndex index;
  const auto a = agent_diagnose({"boot", "Xid 48: double bit error"}, {}, client, table, index);
  EXPECT_EQ(a.result.reason, "ECC Error");
  EXPECT_FALSE(a.learned_rule.has_value());
  EXPECT_EQ(table.size(), 0u);
}

TEST(MockAgent, ServesByPromptDigest) {
  testing::TempDir dir;
  const std::string prompt = "hello agent";
  testing::write_file(dir / (prompt_digest(prompt) + ".json"), R"({"completions": [{"rules": ["^x"]}]})");
  MockAgentClient mock(dir.path());
  const auto r = mock.complete({prompt, 1, 0.0});
  ASSERT_EQ(r.completions.size(), 1u);
  EXPECT_EQ(prompt_digest(prompt), fnv1a_hex(prompt));
  try {
    mock.complete({"unknown prompt", 1, 0.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kAgent);
  }
  EXPECT_EQ(mock.calls(), 2u);
}

// ---- pipeline ----

Diagnoser shipped_diagnoser(AgentClient* client = nullptr) {
  return Diagnoser(default_filter_rules(), ReasonRuleTable::defaults(), shipped_corpus(), client);
}

TEST(Pipeline, BundledCorpusIsDiagnosedExactly) {
  auto d = shipped_diagnoser();
  const auto labels = read_labels(diag_dir() / "corpus" / "labels.csv");
  EXPECT_EQ(labels.size(), 30u);
  std::set<std::string> reasons;
  for (const auto& row : labels) {
    const auto log = testing::read_file(diag_dir() / "corpus" / row[0]);
    const auto r = d.diagnose(log, TaskKey::from_job(row[0]));
    EXPECT_EQ(r.result.reason, row[1]) << row[0];
    EXPECT_EQ(to_string(r.result.category), row[2]) << row[0];
    EXPECT_EQ(to_string(r.result.origin), row[3]) << row[0];
    EXPECT_EQ(r.path, "rule") << row[0];
    EXPECT_TRUE(r.result.well_formed()) << row[0];
    reasons.insert(row[1]);
  }
  EXPECT_EQ(reasons.size(), 29u);
}

TEST(Pipeline, MultiErrorLogResolvesToCudaError) {
  auto d = shipped_diagnoser();
  const auto r = d.diagnose(testing::read_file(diag_dir() / "corpus" / "multi_error.log"));
  EXPECT_EQ(r.result.reason, "CUDA Error");
}

TEST(Pipeline, EvidenceIndexesTheOriginalLog) {
  auto d = shipped_diagnoser();
  const auto text = testing::read_file(diag_dir() / "corpus" / "ecc_error.log");
  const auto lines = split_lines(text);
  const auto r = d.diagnose(text);
  ASSERT_FALSE(r.result.evidence_lines.empty());
  const auto table = ReasonRuleTable::defaults();
  for (auto i : r.result.evidence_lines) {
    ASSERT_LT(i, lines.size());
    bool matched = false;
    for (const auto& rule : table.rules()) matched = matched || (rule.reason == "ECC Error" && rule.matches(lines[i]));
    EXPECT_TRUE(matched) << lines[i];
  }
}

TEST(Pipeline, MetricHeavyLogsCompressAtLeastNinetyPercent) {
  auto d = shipped_diagnoser();
  for (const auto& row : read_labels(diag_dir() / "metric_heavy" / "labels.csv")) {
    const auto r = d.diagnose(testing::read_file(diag_dir() / "metric_heavy" / row[0]));
    EXPECT_GE(r.compression(), 0.9) << row[0];
    EXPECT_GT(r.total_lines, 3000u);
    EXPECT_EQ(r.result.reason, row[1]) << row[0];
  }
}

TEST(Pipeline, CompressionIsSoundCorpusWide) {
  // No line that some reason rule matches is ever filtered out.
  const auto rules = ReasonRuleTable::defaults();
  const auto filters = default_filter_rules();
  std::size_t checked = 0;
  for (const auto* sub : {"corpus", "metric_heavy", "agent"}) {
    for (const auto& entry : std::filesystem::directory_iterator(diag_dir() / sub)) {
      if (entry.path().extension() != ".log") continue;
      const auto lines = split_lines(testing::read_file(entry.path()));
      const auto kept = apply_filters(lines, filters);
      std::set<std::size_t> kept_set(kept.kept_index.begin(), kept.kept_index.end());
      for (std::size_t i = 0; i < lines.size(); ++i) {
        bool diagnosable = false;
        for (const auto& r : rules.rules()) diagnosable = diagnosable || r.matches(lines[i]);
        if (diagnosable) {
          ++checked;
          ASSERT_TRUE(kept_set.count(i)) << entry.path() << ":" << i + 1;
        }
      }
    }
  }
  EXPECT_GT(checked, 30u);
}

TEST(Pipeline, ErrorLineCorpusSurvivesShippedFilters) {
  const auto corpus = shipped_corpus();
  const auto kept = apply_filters(corpus.lines(), default_filter_rules());
  EXPECT_EQ(kept.kept_lines, corpus.lines());
}

TEST(Pipeline, RepeatedFailureCallsTheAgentOnce) {
  MockAgentClient mock(diag_dir() / "mock");
  auto d = shipped_diagnoser(&mock);
  const auto log = testing::read_file(diag_dir() / "agent" / "gpu_off_bus.log");
  std::vector<std::size_t> calls;
  for (int i = 0; i < 5; ++i) {
    const auto r = d.diagnose(log, TaskKey::from_job("gpu_off_bus"), "cli");
    EXPECT_EQ(r.result.reason, "GPU Fallen Off Bus");
    EXPECT_EQ(r.path, i == 0 ? "agent" : "rule");
    calls.push_back(r.client_calls);
  }
  EXPECT_EQ(calls, (std::vector<std::size_t>{1, 0, 0, 0, 0}));
  EXPECT_EQ(mock.calls(), 1u);
}

TEST(Pipeline, VerboseTrainerLearnsAFilterRuleOnce) {
  MockAgentClient mock(diag_dir() / "mock");
  auto d = shipped_diagnoser(&mock);
  const auto log = testing::read_file(diag_dir() / "agent" / "verbose_trainer.log");
  const auto key = TaskKey::from_job("verbose_trainer");
  const auto first = d.diagnose(log, key, "cli");
  EXPECT_EQ(first.result.reason, "Key Error");
  EXPECT_EQ(first.client_calls, 1u);
  EXPECT_EQ(first.filter_rules_learned, 1u);
  ASSERT_EQ(d.learned_filters(key).size(), 1u);
  EXPECT_EQ(d.learned_filters(key)[0].pattern(), "^\\[rank[0-9]+\\] throughput: ");
  const auto second = d.diagnose(log, key, "cli");
  EXPECT_EQ(second.client_calls, 0u);
  EXPECT_EQ(second.kept_lines, first.kept_lines);
  EXPECT_LT(first.kept_lines, 20u);
}

TEST(Pipeline, DeterministicUnderTheMock) {
  auto run = [] {
    MockAgentClient mock(diag_dir() / "mock");
    auto d = shipped_diagnoser(&mock);
    std::vector<DiagnosisReport> out;
    for (const auto* f : {"gpu_off_bus.log", "verbose_trainer.log", "gpu_off_bus.log"}) {
      out.push_back(d.diagnose(testing::read_file(diag_dir() / "agent" / f), TaskKey::from_job(f), "r"));
    }
    return out;
  };
  EXPECT_EQ(run(), run());
}

TEST(Pipeline, NoClientUnknownStaysUnknown) {
  auto d = shipped_diagnoser();
  const auto r = d.diagnose("nothing to see here\nall quiet\n");
  EXPECT_EQ(r.path, "none");
  EXPECT_FALSE(r.result.known());
  EXPECT_EQ(r.client_calls, 0u);
}

TEST(Pipeline, ClientFailureFallsBackToUnknown) {
  FunctionAgentClient client([](const AgentRequest&) -> AgentResponse { throw Error(ErrorCode::kAgent, "down"); });
  auto d = shipped_diagnoser(&client);
  const auto r = d.diagnose("mysterious line\n");
  EXPECT_FALSE(r.result.known());
  EXPECT_EQ(r.path, "none");
}

TEST(TaskKeyTest, StripsRunCounters) {
  EXPECT_EQ(TaskKey::from_job("pretrain_7b_run_12").name_prefix, TaskKey::from_job("pretrain_7b_run_13").name_prefix);
  EXPECT_NE(TaskKey::from_job("a", "v1"), TaskKey::from_job("a", "v2"));
}

}  // namespace
}  // namespace acme::diag
