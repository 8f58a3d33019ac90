#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "stylodet/embedding.hpp"

namespace stylodet {

struct ScoreRecord {
  std::string query_id;
  double score = 0.0;
  int label = 0;  // 1 = query matches the target (machine) condition
  std::string support_id;

  friend bool operator==(const ScoreRecord&, const ScoreRecord&) = default;
};

enum class Aggregation { kMin, kMax };

// Cosine similarity clamped to [-1, 1]. Throws kDegenerateEpisode for a zero
// vector and kDimMismatch for unequal dims.
double cosine_score(std::span<const float> a, std::span<const float> b);
inline double cosine_score(const EmbeddingVector& a, const EmbeddingVector& b) {
  return cosine_score(a.values, b.values);
}

// Negative squared Euclidean distance between the query and the mean of the
// supports (the class prototype).
double prototype_score(std::span<const EmbeddingVector> supports, const EmbeddingVector& query);

double multi_target_score(std::span<const EmbeddingVector> supports, const EmbeddingVector& query,
                          Aggregation aggregation = Aggregation::kMin);

// Minimum of the query's similarity to the support and to a paraphrase of it.
double defended_score(const EmbeddingVector& support, const EmbeddingVector& paraphrased_support,
                      const EmbeddingVector& query);

// CSV with header query_id,support_id,score,label; scores printed with 17
// significant digits.
void write_scores_csv(std::ostream& out, std::span<const ScoreRecord> records);

}  // namespace stylodet
