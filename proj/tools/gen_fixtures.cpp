// Regenerates the committed data files under a data directory:
//   acme_gen_fixtures <data-dir>
// Output is deterministic; rerunning must leave the tree unchanged.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "acme/common/digest.hpp"
#include "acme/common/error.hpp"
#include "acme/diag/agent.hpp"
#include "acme/diag/filter.hpp"
#include "acme/diag/pipeline.hpp"
#include "acme/diag/reason_rules.hpp"
#include "acme/eval/dataset.hpp"
#include "acme/trace/classify.hpp"
#include "acme/trace/synthetic.hpp"
#include "acme/trace/trace_io.hpp"

namespace fs = std::filesystem;
using namespace acme;

namespace {

void write_text(const fs::path& path, std::string_view text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
}

std::string join(const std::vector<std::string>& lines) {
  std::string s;
  for (const auto& l : lines) s += l + '\n';
  return s;
}

std::string stamp(int second) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "[2023-08-14 %02d:%02d:%02d]", 10 + second / 3600, second / 60 % 60,
                second % 60);
  return buf;
}

std::string metric_line(int step) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s step %d/50000 | loss %.4f | lr %.2e | grad_norm %.3f | tokens/s %d",
                stamp(step * 2).c_str(), step, 2.0 + 3.0 / (1.0 + step * 0.01), 3e-4 * (1 - step / 60000.0),
                0.8 + (step % 17) * 0.031, 11800 + (step * 37) % 900);
  return buf;
}

std::string nccl_info(int rank, int i) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "SH-IDC1-10-140-0-%d:%d:%d [%d] NCCL INFO Channel %02d/32 : %d[%d] -> %d[%d] via P2P/IPC/read",
                10 + rank / 8, 41000 + rank, 41200 + rank, rank % 8, i % 32, rank, rank, rank + 1, rank + 1);
  return buf;
}

std::string info_line(int second, const std::string& tag, const std::string& msg) {
  return stamp(second) + " INFO [" + tag + "] " + msg;
}

// Routine startup and a short stretch of training.
std::vector<std::string> preamble(int steps) {
  std::vector<std::string> out;
  out.push_back(info_line(0, "launcher", "world_size=64 tp=1 pp=1 dp=64 zero=1"));
  for (int i = 0; i < 8; ++i) out.push_back(nccl_info(i, i));
  out.push_back(info_line(5, "data", "loaded 1832 shards, 412.6B tokens"));
  out.push_back(info_line(6, "ckpt", "resuming from iter_0012000"));
  for (int s = 1; s <= steps; ++s) {
    out.push_back(metric_line(12000 + s));
    if (s % 10 == 0) out.push_back(info_line(s * 2, "timer", "forward 412.3ms backward 801.9ms optimizer 55.1ms"));
  }
  return out;
}

std::vector<std::string> traceback(const std::vector<std::string>& tail) {
  std::vector<std::string> out = {"Traceback (most recent call last):",
                                  "  File \"train.py\", line 212, in <module>", "    main()",
                                  "  File \"train.py\", line 187, in main", "    trainer.fit()"};
  out.insert(out.end(), tail.begin(), tail.end());
  return out;
}

struct CorpusCase {
  std::string file;
  std::string reason;
  std::vector<std::string> error;
};

std::vector<CorpusCase> corpus_cases() {
  return {
      {"ecc_error.log", "ECC Error",
       {"NVRM: Xid (PCI:0000:1b:00): 48, pid=40211, An uncorrectable double bit error (DBE) has been detected on GPU",
        "RuntimeError: CUDA error: uncorrectable ECC error encountered"}},
      {"nvlink_error.log", "NVLink Error",
       {"NVRM: Xid (PCI:0000:ad:00): 74, pid=3312, NVLink: fatal error detected on link 4",
        "RuntimeError: CUDA error: uncorrectable NVLink error detected during the execution"}},
      {"cuda_error.log", "CUDA Error",
       traceback({"RuntimeError: CUDA error: an illegal memory access was encountered",
                  "CUDA kernel errors might be asynchronously reported at some other API call."})},
      {"nccl_remote_error.log", "NCCL Remote Error",
       {"torch.distributed.DistBackendError: NCCL error in: ProcessGroupNCCL.cpp:1275, remote process exited or there was a network error, NCCL version 2.18.1",
        "ncclRemoteError: A call failed possibly due to a network error or a remote process exiting prematurely."}},
      {"nccl_timeout_error.log", "NCCL Timeout Error",
       {"[Rank 12] Watchdog caught collective operation timeout: WorkNCCL(SeqNum=88812, OpType=ALLREDUCE, Timeout(ms)=1800000) ran for 1800494 milliseconds before timing out."}},
      {"node_failure.log", "Node Failure",
       {"slurmstepd: error: *** JOB 182733 ON SH-IDC1-10-140-1-17 CANCELLED AT 2023-08-14T11:02:13 DUE TO NODE_FAIL ***"}},
      {"network_error.log", "Network Error",
       {"SH-IDC1-10-140-0-23:41007:41390 [7] NET/IB : Got completion from peer 10.140.0.24<52317> with error 12, opcode 1, len 0, vendor err 129 (Recv)",
        "status IBV_WC_RETRY_EXC_ERR"}},
      {"s3_storage_error.log", "S3 Storage Error",
       traceback({"botocore.exceptions.ClientError: An error occurred (SlowDown) when calling the PutObject operation: Please reduce your request rate."})},
      {"connection_error.log", "Connection Error",
       traceback({"ConnectionRefusedError: [Errno 111] Connection refused"})},
      {"out_of_memory_error.log", "Out of Memory Error",
       traceback({"torch.cuda.OutOfMemoryError: CUDA out of memory. Tried to allocate 2.00 GiB (GPU 3; 79.35 GiB total capacity; 75.12 GiB already allocated)"})},
      {"dataloader_killed.log", "Dataloader Killed",
       traceback({"RuntimeError: DataLoader worker (pid 28741) is killed by signal: Killed."})},
      {"model_loading_error.log", "Model Loading Error",
       traceback({"RuntimeError: Error(s) in loading state_dict for LlamaForCausalLM:",
                  "\tsize mismatch for lm_head.weight: copying a param with shape [32000, 4096] from checkpoint"})},
      {"dataset_loading_error.log", "Dataset Loading Error",
       traceback({"datasets.builder.DatasetGenerationError: An error occurred while generating the dataset"})},
      {"zero_division_error.log", "Zero Division Error", traceback({"ZeroDivisionError: division by zero"})},
      {"value_error.log", "Value Error", traceback({"ValueError: too many values to unpack (expected 2)"})},
      {"attribute_error.log", "Attribute Error",
       traceback({"AttributeError: 'NoneType' object has no attribute 'shape'"})},
      {"assertion_error.log", "Assertion Error",
       traceback({"AssertionError: global batch size must be divisible by micro_batch_size * dp_size"})},
      {"runtime_error.log", "Runtime Error",
       traceback({"RuntimeError: shape '[4, 2048, 32, 128]' is invalid for input of size 1048576"})},
      {"syntax_error.log", "Syntax Error",
       {"  File \"train.py\", line 88", "    model = build_model(cfg", "                       ^",
        "SyntaxError: '(' was never closed"}},
      {"name_error.log", "Name Error", traceback({"NameError: name 'tokenizer' is not defined"})},
      {"import_error.log", "Import Error", traceback({"ModuleNotFoundError: No module named 'flash_attn'"})},
      {"argument_error.log", "Argument Error",
       {"usage: train.py [-h] --config CONFIG [--seed SEED]", "train.py: error: unrecognized arguments: --lr_decay 0.1"}},
      {"called_process_error.log", "Called Process Error",
       traceback({"subprocess.CalledProcessError: Command '['git', 'rev-parse', 'HEAD']' returned non-zero exit status 128."})},
      {"permission_error.log", "Permission Error",
       traceback({"PermissionError: [Errno 13] Permission denied: '/mnt/shared/ckpt/iter_0012000'"})},
      {"file_not_found_error.log", "File Not Found Error",
       traceback({"FileNotFoundError: [Errno 2] No such file or directory: 'configs/llama_7b.yaml'"})},
      {"os_error.log", "OS Error", traceback({"OSError: [Errno 28] No space left on device"})},
      {"key_error.log", "Key Error", traceback({"KeyError: 'input_ids'"})},
      {"index_error.log", "Index Error", traceback({"IndexError: list index out of range"})},
      {"type_error.log", "Type Error",
       traceback({"TypeError: forward() got an unexpected keyword argument 'use_cache'"})},
  };
}


std::vector<std::string> metric_heavy(int steps, const std::vector<std::string>& error) {
  std::vector<std::string> lines = preamble(0);
  for (int s = 1; s <= steps; ++s) {
    lines.push_back(metric_line(12000 + s));
    if (s % 10 == 0) lines.push_back(info_line(s * 2, "timer", "forward 412.3ms backward 801.9ms optimizer 55.1ms"));
    if (s % 500 == 0) lines.push_back(info_line(s * 2, "ckpt", "saved iter_" + std::to_string(12000 + s)));
  }
  lines.insert(lines.end(), error.begin(), error.end());
  return lines;
}

// Scripted agent used once to record the mock responses.
diag::AgentResponse scripted(const diag::AgentRequest& req) {
  diag::AgentResponse r;
  if (req.prompt.rfind("task: filter-rules", 0) == 0) {
    for (int i = 0; i < req.k; ++i) {
      nlohmann::json c;
      if (req.prompt.find("throughput:") != std::string::npos) {
        c["rules"] = i < 2 ? nlohmann::json::array({R"(^\[rank[0-9]+\] throughput: )"})
                           : nlohmann::json::array({"samples/s"});
      } else {
        c["rules"] = nlohmann::json::array();
      }
      r.completions.push_back(c);
    }
    return r;
  }
  if (req.prompt.find("fallen off the bus") != std::string::npos) {
    nlohmann::json c;
    c["reason"] = "GPU Fallen Off Bus";
    c["category"] = "Infrastructure";
    c["origin"] = "Infrastructure";
    c["recoverable"] = true;
    c["mitigation"] = "Cordon the node and restart from the last checkpoint";
    c["rule"] = "GPU has fallen off the bus";
    r.completions.push_back(c);
  }
  return r;
}

void write_diag(const fs::path& dir) {
  write_text(dir / "reason_rules.tsv", diag::ReasonRuleTable::default_text());

  const std::vector<diag::FilterRule> filters = diag::default_filter_rules();
  std::ostringstream fr;
  fr << "# pattern\tprovenance\thit_count\n";
  diag::write_filter_rules(fr, filters);
  write_text(dir / "filter_rules.tsv", fr.str());

  const auto table = diag::ReasonRuleTable::defaults();
  std::set<std::string> error_lines;
  std::string labels = "file,reason,category,origin\n";
  for (const auto& c : corpus_cases()) {
    std::vector<std::string> lines = preamble(30);
    lines.insert(lines.end(), c.error.begin(), c.error.end());
    write_text(dir / "corpus" / c.file, join(lines));
    const diag::ReasonInfo* info = diag::find_reason(c.reason);
    if (!info) throw Error(ErrorCode::kInvalid, "unknown reason " + c.reason);
    labels += c.file + "," + c.reason + "," + std::string(diag::to_string(info->category)) + "," +
              std::string(diag::to_string(info->origin)) + "\n";
    for (const auto& l : c.error) error_lines.insert(l);
  }
  // Worked example: a timeout cascade whose root cause is the CUDA error.
  std::vector<std::string> multi = preamble(30);
  for (const char* l : {
           "RuntimeError: CUDA error: an illegal memory access was encountered",
           "[Rank 3] Watchdog caught collective operation timeout: WorkNCCL(SeqNum=4410, OpType=ALLREDUCE, Timeout(ms)=1800000) ran for 1800091 milliseconds before timing out.",
           "RuntimeError: NCCL communicator was aborted on rank 3. Original reason for failure was: [Rank 3] Watchdog caught collective operation timeout"}) {
    multi.push_back(l);
    error_lines.insert(l);
  }
  write_text(dir / "corpus" / "multi_error.log", join(multi));
  labels += "multi_error.log,CUDA Error,Infrastructure,Infrastructure\n";
  write_text(dir / "corpus" / "labels.csv", labels);

  const std::vector<std::pair<std::string, std::vector<std::string>>> heavy = {
      {"metric_heavy_oom.log", traceback({"torch.cuda.OutOfMemoryError: CUDA out of memory. Tried to allocate 8.00 GiB"})},
      {"metric_heavy_nccl_timeout.log",
       {"[Rank 40] Watchdog caught collective operation timeout: WorkNCCL(SeqNum=190233, OpType=ALLGATHER, Timeout(ms)=1800000) ran for 1800210 milliseconds before timing out."}},
      {"metric_heavy_value_error.log", traceback({"ValueError: Expected input batch_size (8) to match target batch_size (4)."})},
  };
  std::string heavy_labels = "file,reason\n";
  const char* heavy_reasons[] = {"Out of Memory Error", "NCCL Timeout Error", "Value Error"};
  for (std::size_t i = 0; i < heavy.size(); ++i) {
    write_text(dir / "metric_heavy" / heavy[i].first, join(metric_heavy(3000, heavy[i].second)));
    heavy_labels += heavy[i].first + "," + heavy_reasons[i] + "\n";
    for (const auto& l : heavy[i].second) error_lines.insert(l);
  }
  write_text(dir / "metric_heavy" / "labels.csv", heavy_labels);

  std::string corpus_text = "# Known error lines; filter rules must never match any of them.\n";
  for (const auto& l : error_lines) corpus_text += l + "\n";
  write_text(dir / "error_lines.txt", corpus_text);

  // Agent scenarios: a failure no shipped rule knows, and a log whose routine
  // lines the shipped filters miss.
  std::vector<std::string> novel = preamble(20);
  novel.push_back("NVRM: Xid (PCI:0000:3b:00): 79, pid=1207, GPU has fallen off the bus.");
  novel.push_back("srun: error: SH-IDC1-10-140-0-31: task 5: Exited with exit code 1");
  write_text(dir / "agent" / "gpu_off_bus.log", join(novel));

  std::vector<std::string> verbose = preamble(10);
  for (int i = 0; i < 200; ++i) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "[rank%d] throughput: %.1f samples/s, mfu %.3f", i % 8, 300.0 + (i * 7) % 40,
                  0.40 + (i % 9) * 0.002);
    verbose.push_back(buf);
  }
  const auto key_error = traceback({"KeyError: 'attention_mask'"});
  verbose.insert(verbose.end(), key_error.begin(), key_error.end());
  write_text(dir / "agent" / "verbose_trainer.log", join(verbose));

  const fs::path mock = dir / "mock";
  fs::remove_all(mock);
  fs::create_directories(mock);
  diag::FunctionAgentClient recorder([&](const diag::AgentRequest& req) {
    diag::AgentResponse r = scripted(req);
    nlohmann::ordered_json j;
    j["completions"] = r.completions;
    write_text(mock / (diag::prompt_digest(req.prompt) + ".json"), j.dump(2) + "\n");
    return r;
  });
  const auto corpus = diag::ValidationCorpus::load(dir / "error_lines.txt");
  diag::Diagnoser d(filters, table, corpus, &recorder);
  d.diagnose(join(novel), diag::TaskKey::from_job("gpu-off-bus"), "record");
  d.diagnose(join(verbose), diag::TaskKey::from_job("verbose-trainer"), "record");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: acme_gen_fixtures <data-dir>\n";
    return 1;
  }
  try {
    const fs::path data = argv[1];
    write_text(data / "workload_keywords.tsv", std::string(trace::KeywordTable::default_text()));

    auto kalos = trace::synthetic_trace(trace::SyntheticClusterSpec::kalos_like(5000), 2024);
    const auto seren = trace::synthetic_trace(trace::SyntheticClusterSpec::seren_like(8000), 2025);
    kalos.insert(kalos.end(), seren.begin(), seren.end());
    std::ostringstream csv;
    trace::write_trace(csv, kalos);
    write_text(data / "traces" / "acme_excerpt.csv", csv.str());

    std::ostringstream ds;
    eval::write_datasets(ds, eval::synthetic_eval_workload(10));
    write_text(data / "eval" / "datasets_63.csv", ds.str());

    write_diag(data / "diag");
  } catch (const std::exception& e) {
    std::cerr << "acme_gen_fixtures: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
