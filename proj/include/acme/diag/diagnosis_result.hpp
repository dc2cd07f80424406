#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace acme::diag {

// Failure categories of the production failure taxonomy.
enum class Category { kInfrastructure, kFramework, kScript, kUnknown };
enum class Origin { kUser, kInfrastructure, kUnknown };
enum class Recoverable { kYes, kNo, kUnknown };

std::string_view to_string(Category c);
std::string_view to_string(Origin o);
std::string_view to_string(Recoverable r);
std::optional<Category> parse_category(std::string_view s);
std::optional<Origin> parse_origin(std::string_view s);
std::optional<Recoverable> parse_recoverable(std::string_view s);

inline constexpr std::string_view kUnknownReason = "Unknown";

struct DiagnosisResult {
  std::string reason{kUnknownReason};
  Category category = Category::kUnknown;
  Origin origin = Origin::kUnknown;
  Recoverable recoverable = Recoverable::kUnknown;
  std::string mitigation;
  std::vector<std::size_t> evidence_lines;  // indices into the diagnosed lines

  bool known() const { return reason != kUnknownReason; }
  // reason known => category known and evidence present.
  bool well_formed() const;

  friend bool operator==(const DiagnosisResult&, const DiagnosisResult&) = default;
};

}  // namespace acme::diag
