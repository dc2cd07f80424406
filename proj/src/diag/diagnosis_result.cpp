#include "acme/diag/diagnosis_result.hpp"

#include "acme/common/text.hpp"

namespace acme::diag {

std::string_view to_string(Category c) {
  switch (c) {
    case Category::kInfrastructure: return "Infrastructure";
    case Category::kFramework: return "Framework";
    case Category::kScript: return "Script";
    case Category::kUnknown: return "Unknown";
  }
  return "Unknown";
}

std::string_view to_string(Origin o) {
  switch (o) {
    case Origin::kUser: return "User";
    case Origin::kInfrastructure: return "Infrastructure";
    case Origin::kUnknown: return "Unknown";
  }
  return "Unknown";
}

std::string_view to_string(Recoverable r) {
  switch (r) {
    case Recoverable::kYes: return "yes";
    case Recoverable::kNo: return "no";
    case Recoverable::kUnknown: return "unknown";
  }
  return "unknown";
}

std::optional<Category> parse_category(std::string_view s) {
  const std::string v = text::lower(text::trim(s));
  if (v == "infrastructure") return Category::kInfrastructure;
  if (v == "framework") return Category::kFramework;
  if (v == "script") return Category::kScript;
  if (v == "unknown") return Category::kUnknown;
  return std::nullopt;
}

std::optional<Origin> parse_origin(std::string_view s) {
  const std::string v = text::lower(text::trim(s));
  if (v == "user") return Origin::kUser;
  if (v == "infrastructure") return Origin::kInfrastructure;
  if (v == "unknown") return Origin::kUnknown;
  return std::nullopt;
}

std::optional<Recoverable> parse_recoverable(std::string_view s) {
  const std::string v = text::lower(text::trim(s));
  if (v == "yes" || v == "true") return Recoverable::kYes;
  if (v == "no" || v == "false") return Recoverable::kNo;
  if (v == "unknown") return Recoverable::kUnknown;
  return std::nullopt;
}

bool DiagnosisResult::well_formed() const {
  if (!known()) return true;
  return category != Category::kUnknown && !evidence_lines.empty();
}

}  // namespace acme::diag
