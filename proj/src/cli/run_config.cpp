#include "acme/cli/run_config.hpp"

#include <charconv>

#include "acme/common/error.hpp"
#include "acme/common/text.hpp"

namespace acme::cli {

namespace fs = std::filesystem;

std::uint64_t parse_seed(const std::string& text) {
  const std::string_view s = text::trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kConfig, "seed must be a non-negative integer, got '" + text + "'");
  }
  return v;
}

std::optional<fs::path> RunConfig::existing_path(const std::string& key) const {
  const auto value = kv.get(key);
  if (!value || text::trim(*value).empty()) return std::nullopt;
  const fs::path p = kv.resolve_path(std::string(text::trim(*value)));
  if (!fs::exists(p)) throw Error(ErrorCode::kData, key + ": no such file: " + p.string());
  return p;
}

RunConfig RunConfig::build(const std::string& command, KvConfig kv, const char* env_seed) {
  RunConfig rc;
  rc.command = command;
  if (env_seed != nullptr && *env_seed != '\0') kv.set("seed", env_seed);
  if (const auto s = kv.get("seed")) rc.seed = parse_seed(*s);
  rc.kv = std::move(kv);

  const std::string out = rc.kv.get_string("output.dir", "out/" + command);
  rc.output_dir = rc.kv.resolve_path(out);

  rc.cluster = sim::ClusterSpec::from_config(rc.kv);
  rc.cluster.validate();
  rc.columns = trace::ColumnMap::from_config(rc.kv);
  rc.quota.reserved_nodes = static_cast<int>(rc.kv.get_int("sched.reserved_nodes", 0));
  rc.quota.preemptible = rc.kv.get_bool("sched.preemptible", true);
  rc.checkpoint = ft::CheckpointConfig::from_config(rc.kv, "checkpoint");
  rc.checkpoint.validate();

  rc.trace_path = rc.existing_path("trace.path");
  rc.keywords_path = rc.existing_path("trace.keywords");
  rc.failure_model_path = rc.existing_path("failure_model.path");
  rc.eval_datasets = rc.existing_path("eval.datasets");
  return rc;
}

std::uint64_t RunConfig::require_seed() const {
  if (!seed) {
    throw Error(ErrorCode::kConfig, command + " needs a seed: set `seed` in the config or " + kSeedEnv);
  }
  return *seed;
}

std::map<std::string, std::string> RunConfig::recorded() const {
  std::map<std::string, std::string> out;
  for (const auto& [k, v] : kv.values()) {
    if (k.rfind("output.", 0) == 0) continue;
    out[k] = v;
  }
  return out;
}

}  // namespace acme::cli
