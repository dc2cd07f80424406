#include "acme/common/kv_config.hpp"

#include <fstream>
#include <sstream>

#include "acme/common/error.hpp"
#include "acme/common/text.hpp"

namespace acme {

KvConfig KvConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfig, "cannot open config file: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  KvConfig cfg = parse(ss.str(), path.string());
  cfg.base_dir_ = path.parent_path();
  return cfg;
}

KvConfig KvConfig::parse(const std::string& text, const std::string& origin) {
  KvConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view body = text::trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kConfig,
                  origin + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key(text::trim(body.substr(0, eq)));
    if (key.empty()) {
      throw Error(ErrorCode::kConfig, origin + ":" + std::to_string(lineno) + ": empty key");
    }
    cfg.values_[key] = std::string(text::trim(body.substr(eq + 1)));
  }
  return cfg;
}

void KvConfig::set(const std::string& key, const std::string& value) { values_[key] = value; }

void KvConfig::set_assignment(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw Error(ErrorCode::kConfig, "expected key=value, got '" + assignment + "'");
  }
  set(std::string(text::trim(std::string_view(assignment).substr(0, eq))),
      std::string(text::trim(std::string_view(assignment).substr(eq + 1))));
}

std::optional<std::string> KvConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string KvConfig::require(const std::string& key) const {
  const auto v = get(key);
  if (!v) throw Error(ErrorCode::kConfig, "missing required config key: " + key);
  return *v;
}

std::string KvConfig::get_string(const std::string& key, const std::string& fallback) const {
  return get(key).value_or(fallback);
}

double KvConfig::get_double(const std::string& key, double fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  const auto d = text::parse_double(*v);
  if (!d) throw Error(ErrorCode::kConfig, "config key " + key + ": not a number: " + *v);
  return *d;
}

long long KvConfig::get_int(const std::string& key, long long fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  const auto i = text::parse_int(*v);
  if (!i) throw Error(ErrorCode::kConfig, "config key " + key + ": not an integer: " + *v);
  return *i;
}

bool KvConfig::get_bool(const std::string& key, bool fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  const std::string s = text::lower(*v);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw Error(ErrorCode::kConfig, "config key " + key + ": not a boolean: " + *v);
}

std::vector<double> KvConfig::get_double_list(const std::string& key,
                                              const std::vector<double>& fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  std::vector<double> out;
  for (const auto& part : text::split(*v, ',')) {
    const auto d = text::parse_double(part);
    if (!d) throw Error(ErrorCode::kConfig, "config key " + key + ": bad list element: " + part);
    out.push_back(*d);
  }
  return out;
}

std::map<std::string, std::string> KvConfig::with_prefix(const std::string& prefix) const {
  std::map<std::string, std::string> out;
  const std::string p = prefix + ".";
  for (auto it = values_.lower_bound(p); it != values_.end(); ++it) {
    if (it->first.compare(0, p.size(), p) != 0) break;
    out[it->first.substr(p.size())] = it->second;
  }
  return out;
}

std::filesystem::path KvConfig::resolve_path(const std::string& value) const {
  std::filesystem::path p(value);
  if (p.is_absolute() || base_dir_.empty()) return p;
  return base_dir_ / p;
}

}  // namespace acme
