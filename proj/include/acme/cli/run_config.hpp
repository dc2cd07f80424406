#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "acme/common/kv_config.hpp"
#include "acme/ft/checkpoint.hpp"
#include "acme/sched/dispatch.hpp"
#include "acme/sim/cluster.hpp"
#include "acme/trace/trace_io.hpp"

namespace acme::cli {

inline constexpr const char* kSeedEnv = "ACME_SIM_SEED";

// Validated view of one scenario's configuration. Referenced files are
// resolved against the config file's directory and checked for existence.
struct RunConfig {
  std::string command;
  KvConfig kv;  // after --set overrides and the seed override
  std::optional<std::uint64_t> seed;
  std::filesystem::path output_dir;

  sim::ClusterSpec cluster;
  std::optional<std::filesystem::path> trace_path;
  trace::ColumnMap columns;
  std::optional<std::filesystem::path> keywords_path;
  sched::Quota quota;
  ft::CheckpointConfig checkpoint;
  std::optional<std::filesystem::path> failure_model_path;
  std::optional<std::filesystem::path> eval_datasets;

  // `env_seed` is the value of ACME_SIM_SEED, or null. Throws kConfig on bad
  // or missing keys and kData when a referenced file does not exist.
  static RunConfig build(const std::string& command, KvConfig kv, const char* env_seed);

  std::uint64_t require_seed() const;
  // Path-valued key resolved against the config; kData when it is missing
  // on disk.
  std::optional<std::filesystem::path> existing_path(const std::string& key) const;
  // Keys recorded in report.json; output.* is left out so the report does
  // not depend on where it is written.
  std::map<std::string, std::string> recorded() const;
};

std::uint64_t parse_seed(const std::string& text);

}  // namespace acme::cli
