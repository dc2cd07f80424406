#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace acme {

// 64-bit FNV-1a. Used for event-log hashes and agent prompt digests.
class Fnv1a {
 public:
  void update(std::string_view bytes);
  void update_u64(std::uint64_t value);
  void update_double(double value);
  std::uint64_t value() const { return state_; }
  std::string hex() const;

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::uint64_t fnv1a(std::string_view bytes);
std::string fnv1a_hex(std::string_view bytes);

}  // namespace acme
