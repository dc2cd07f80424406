#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace acme {

// Flat `key = value` configuration. Lines starting with '#' are comments.
// Later assignments override earlier ones, so `--set` flags are applied by
// calling set() after load().
class KvConfig {
 public:
  static KvConfig load(const std::filesystem::path& path);
  static KvConfig parse(const std::string& text, const std::string& origin = "<string>");

  void set(const std::string& key, const std::string& value);
  // Parses "key=value"; throws kConfig on malformed input.
  void set_assignment(const std::string& assignment);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::optional<std::string> get(const std::string& key) const;
  std::string require(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_double_list(const std::string& key,
                                      const std::vector<double>& fallback) const;

  // Keys sharing `prefix.`; the prefix is stripped in the result.
  std::map<std::string, std::string> with_prefix(const std::string& prefix) const;

  // Relative paths resolve against the directory of the loaded file.
  std::filesystem::path resolve_path(const std::string& value) const;
  const std::filesystem::path& base_dir() const { return base_dir_; }
  void set_base_dir(std::filesystem::path dir) { base_dir_ = std::move(dir); }

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
  std::filesystem::path base_dir_;
};

}  // namespace acme
