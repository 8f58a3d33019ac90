#include "stylodet/kernels.hpp"

#include <exception>

#include "stylodet/common.hpp"
#include "stylodet/scoring.hpp"

namespace stylodet {

namespace {

EmbeddedEpisode embed_one(const Episode& ep, const DocumentEmbedder& embedder, PoolingOptions pooling) {
  EmbeddedEpisode out{ep.id, ep.author, ep.source, ep.domain, {}, {}, {}};
  out.documents.reserve(ep.documents.size());
  for (const auto& d : ep.documents) {
    out.document_ids.push_back(d.id);
    out.documents.push_back(embedder.embed(d));
  }
  try {
    out.pooled = pool_embeddings(out.documents, pooling);
  } catch (const Error& e) {
    throw Error(e.code(), std::string(e.what()) + " (episode '" + ep.id + "')");
  }
  return out;
}

}  // namespace

std::vector<EmbeddedEpisode> embed_episodes(std::span<const Episode> episodes, const DocumentEmbedder& embedder,
                                            PoolingOptions pooling, bool parallel) {
  std::vector<EmbeddedEpisode> out(episodes.size());
  std::vector<std::exception_ptr> errors(episodes.size());
  const auto n = static_cast<std::ptrdiff_t>(episodes.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[i] = embed_one(episodes[i], embedder, pooling);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::vector<EmbeddedEpisode> episodes_from_records(std::span<const EmbeddingRecord> records) {
  std::vector<EmbeddedEpisode> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back({r.id, r.author, r.source, r.domain, r.vector, {}, {}});
  return out;
}

std::vector<EmbeddingRecord> episode_records(std::span<const EmbeddedEpisode> episodes) {
  std::vector<EmbeddingRecord> out;
  out.reserve(episodes.size());
  for (const auto& e : episodes) out.push_back({e.id, e.author, e.source, e.domain, e.pooled});
  return out;
}

std::vector<double> cosine_matrix(std::span<const EmbeddingVector> rows, std::span<const EmbeddingVector> cols,
                                  bool parallel) {
  std::vector<double> out(rows.size() * cols.size());
  std::vector<std::exception_ptr> errors(rows.size());
  const auto n = static_cast<std::ptrdiff_t>(rows.size());
#pragma omp parallel for schedule(static) if (parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      for (std::size_t j = 0; j < cols.size(); ++j) out[i * cols.size() + j] = cosine_score(rows[i], cols[j]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

namespace reference {

std::vector<EmbeddedEpisode> embed_episodes_serial(std::span<const Episode> episodes, const DocumentEmbedder& embedder,
                                                   PoolingOptions pooling) {
  std::vector<EmbeddedEpisode> out;
  for (const auto& ep : episodes) out.push_back(embed_one(ep, embedder, pooling));
  return out;
}

std::vector<double> cosine_matrix_serial(std::span<const EmbeddingVector> rows, std::span<const EmbeddingVector> cols) {
  std::vector<double> out;
  out.reserve(rows.size() * cols.size());
  for (const auto& r : rows) {
    for (const auto& c : cols) out.push_back(cosine_score(r, c));
  }
  return out;
}

}  // namespace reference

}  // namespace stylodet
