#include "stylodet/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "stylodet/common.hpp"

namespace stylodet {

double cosine_score(std::span<const float> a, std::span<const float> b) {
  const double ab = dot(a, b);
  const double aa = dot(a, a);
  const double bb = dot(b, b);
  if (aa == 0.0 || bb == 0.0) throw Error(Errc::kDegenerateEpisode, "cosine of a zero vector");
  const double c = ab / (std::sqrt(aa) * std::sqrt(bb));
  return std::clamp(c, -1.0, 1.0);
}

double prototype_score(std::span<const EmbeddingVector> supports, const EmbeddingVector& query) {
  if (supports.empty()) throw Error(Errc::kInvalidArgument, "prototype requires at least one support");
  const std::size_t dim = query.dim();
  std::vector<double> proto(dim, 0.0);
  for (const auto& s : supports) {
    if (s.dim() != dim) throw Error(Errc::kDimMismatch, "support and query dims differ");
    for (std::size_t i = 0; i < dim; ++i) proto[i] += static_cast<double>(s.values[i]);
  }
  const double inv = 1.0 / static_cast<double>(supports.size());
  double dist = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    const double d = static_cast<double>(query.values[i]) - proto[i] * inv;
    dist += d * d;
  }
  return -dist;
}

double multi_target_score(std::span<const EmbeddingVector> supports, const EmbeddingVector& query,
                          Aggregation aggregation) {
  if (supports.empty()) throw Error(Errc::kInvalidArgument, "multi-target scoring requires at least one support");
  double best = cosine_score(supports.front(), query);
  for (std::size_t i = 1; i < supports.size(); ++i) {
    const double s = cosine_score(supports[i], query);
    best = aggregation == Aggregation::kMin ? std::min(best, s) : std::max(best, s);
  }
  return best;
}

double defended_score(const EmbeddingVector& support, const EmbeddingVector& paraphrased_support,
                      const EmbeddingVector& query) {
  return std::min(cosine_score(support, query), cosine_score(paraphrased_support, query));
}

void write_scores_csv(std::ostream& out, std::span<const ScoreRecord> records) {
  out << "query_id,support_id,score,label\n";
  char buf[64];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%.17g", r.score);
    out << csv_field(r.query_id) << ',' << csv_field(r.support_id) << ',' << buf << ',' << r.label << '\n';
  }
}

}  // namespace stylodet
