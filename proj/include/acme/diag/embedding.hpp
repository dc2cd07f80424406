#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "acme/diag/diagnosis_result.hpp"

namespace acme::diag {

// Lowercased runs of [A-Za-z0-9_]; everything else separates tokens.
std::vector<std::string> tokenize(std::string_view text);

using SparseVector = std::map<std::string, double>;

double cosine(const SparseVector& a, const SparseVector& b);

// TF-IDF store over compressed logs. Weights are raw term count times
// smoothed idf = ln((1 + N) / (1 + df)) + 1, recomputed whenever a document
// is added.
class EmbeddingIndex {
 public:
  struct Document {
    std::string text;
    DiagnosisResult result;
  };

  void add(std::string text, DiagnosisResult result);
  std::size_t size() const { return documents_.size(); }
  bool empty() const { return documents_.empty(); }
  const std::vector<Document>& documents() const { return documents_; }
  const std::vector<SparseVector>& vectors() const { return vectors_; }

  SparseVector embed(std::string_view text) const;
  double idf(const std::string& term) const;

 private:
  void rebuild();

  std::vector<Document> documents_;
  std::vector<std::map<std::string, double>> counts_;
  std::map<std::string, std::size_t> df_;
  std::vector<SparseVector> vectors_;
};

struct Match {
  std::size_t document = 0;
  double similarity = 0;
};

// Descending similarity; ties keep insertion order.
std::vector<Match> retrieve_similar(std::string_view query, const EmbeddingIndex& index,
                                    std::size_t k);

}  // namespace acme::diag
