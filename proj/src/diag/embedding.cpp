#include "acme/diag/embedding.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "acme/common/error.hpp"

namespace acme::diag {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u) || c == '_') {
      cur.push_back(static_cast<char>(std::tolower(u)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

double cosine(const SparseVector& a, const SparseVector& b) {
  double dot = 0;
  double na = 0;
  double nb = 0;
  for (const auto& [t, w] : a) {
    na += w * w;
    if (const auto it = b.find(t); it != b.end()) dot += w * it->second;
  }
  for (const auto& [t, w] : b) nb += w * w;
  if (na == 0 || nb == 0) return 0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

void EmbeddingIndex::add(std::string text, DiagnosisResult result) {
  std::map<std::string, double> counts;
  for (auto& tok : tokenize(text)) counts[std::move(tok)] += 1;
  for (const auto& [t, c] : counts) ++df_[t];
  counts_.push_back(std::move(counts));
  documents_.push_back({std::move(text), std::move(result)});
  rebuild();
}

double EmbeddingIndex::idf(const std::string& term) const {
  const auto it = df_.find(term);
  const double df = it == df_.end() ? 0.0 : static_cast<double>(it->second);
  const double n = static_cast<double>(documents_.size());
  return std::log((1.0 + n) / (1.0 + df)) + 1.0;
}

void EmbeddingIndex::rebuild() {
  vectors_.clear();
  vectors_.reserve(counts_.size());
  for (const auto& counts : counts_) {
    SparseVector v;
    for (const auto& [t, c] : counts) v[t] = c * idf(t);
    vectors_.push_back(std::move(v));
  }
}

SparseVector EmbeddingIndex::embed(std::string_view text) const {
  SparseVector v;
  for (auto& tok : tokenize(text)) v[std::move(tok)] += 1;
  for (auto& [t, w] : v) w *= idf(t);
  return v;
}

std::vector<Match> retrieve_similar(std::string_view query, const EmbeddingIndex& index,
                                    std::size_t k) {
  if (k < 1) throw Error(ErrorCode::kInvalid, "retrieve_similar needs k >= 1");
  std::vector<Match> out;
  if (index.empty()) return out;
  const SparseVector q = index.embed(query);
  for (std::size_t i = 0; i < index.size(); ++i) out.push_back({i, cosine(q, index.vectors()[i])});
  std::stable_sort(out.begin(), out.end(),
                   [](const Match& a, const Match& b) { return a.similarity > b.similarity; });
  if (out.size() > k) out.resize(k);
  return out;
}

}  // namespace acme::diag
