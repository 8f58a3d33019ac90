#pragma once

#include <span>
#include <string>
#include <vector>

#include "stylodet/corpus.hpp"
#include "stylodet/embedder.hpp"
#include "stylodet/embedding.hpp"
#include "stylodet/store.hpp"

namespace stylodet {

// An episode after embedding. `documents` may be empty when the episode was
// loaded from a store that only holds pooled vectors.
struct EmbeddedEpisode {
  std::string id;
  std::string author;
  SourceLabel source;
  std::string domain;
  EmbeddingVector pooled;
  std::vector<std::string> document_ids;
  std::vector<EmbeddingVector> documents;

  friend bool operator==(const EmbeddedEpisode&, const EmbeddedEpisode&) = default;
};

std::vector<EmbeddedEpisode> embed_episodes(std::span<const Episode> episodes, const DocumentEmbedder& embedder,
                                            PoolingOptions pooling = {}, bool parallel = true);

std::vector<EmbeddedEpisode> episodes_from_records(std::span<const EmbeddingRecord> records);
std::vector<EmbeddingRecord> episode_records(std::span<const EmbeddedEpisode> episodes);

// Row-major rows.size() x cols.size() matrix of cosine_score values.
std::vector<double> cosine_matrix(std::span<const EmbeddingVector> rows, std::span<const EmbeddingVector> cols,
                                  bool parallel = true);

namespace reference {

std::vector<EmbeddedEpisode> embed_episodes_serial(std::span<const Episode> episodes, const DocumentEmbedder& embedder,
                                                   PoolingOptions pooling = {});
std::vector<double> cosine_matrix_serial(std::span<const EmbeddingVector> rows, std::span<const EmbeddingVector> cols);

}  // namespace reference

}  // namespace stylodet
