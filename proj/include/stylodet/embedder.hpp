#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "stylodet/corpus.hpp"
#include "stylodet/embedding.hpp"

namespace stylodet {

const std::vector<std::string>& default_function_words();

inline constexpr std::size_t kStatisticsFeatures = 16;

struct FeaturizerConfig {
  std::vector<int> ngram_orders = {1, 2, 3, 4};
  std::size_t buckets = 8192;  // power of two, >= 256
  std::vector<std::string> function_words = default_function_words();
  // Relative weight of each block after per-block normalization.
  double ngram_weight = 1.0;
  double function_word_weight = 1.0;
  double statistics_weight = 1.0;
  std::shared_ptr<const ProjectionHead> projection;

  void validate() const;
  std::size_t feature_dim() const { return buckets + function_words.size() + kStatisticsFeatures; }
  std::size_t output_dim() const { return projection ? projection->d_out : feature_dim(); }
};

// The style function f on single documents.
class DocumentEmbedder {
 public:
  virtual ~DocumentEmbedder() = default;
  virtual EmbeddingVector embed(const Document& doc) const = 0;
  virtual std::size_t dim() const = 0;
  virtual std::string describe() const = 0;
};

// Deterministic stand-in for a neural style encoder: hashed character
// n-grams, function-word frequencies and surface statistics.
class StylometricFeaturizer final : public DocumentEmbedder {
 public:
  explicit StylometricFeaturizer(FeaturizerConfig config = {});

  struct Blocks {
    std::vector<double> ngrams;          // relative frequencies per bucket
    std::vector<double> function_words;  // relative frequencies per list entry
    std::vector<double> statistics;      // kStatisticsFeatures values
  };

  // Raw feature blocks before normalization.
  Blocks blocks(std::string_view text) const;

  // Unprojected, unit-norm feature vector.
  EmbeddingVector features(std::string_view text) const;

  EmbeddingVector embed_text(std::string_view text) const;
  EmbeddingVector embed(const Document& doc) const override { return embed_text(doc.text); }
  std::size_t dim() const override { return config_.output_dim(); }
  std::string describe() const override;

  const FeaturizerConfig& config() const { return config_; }

 private:
  FeaturizerConfig config_;
  std::unordered_map<std::string, std::size_t> word_index_;
};

// Looks vectors up by document id, for embeddings computed elsewhere.
class StoreEmbedder final : public DocumentEmbedder {
 public:
  StoreEmbedder(std::size_t dim, std::unordered_map<std::string, EmbeddingVector> by_id);

  EmbeddingVector embed(const Document& doc) const override;
  std::size_t dim() const override { return dim_; }
  std::string describe() const override { return "store"; }

 private:
  std::size_t dim_;
  std::unordered_map<std::string, EmbeddingVector> by_id_;
};

// Applies a projection head to another embedder's output, then normalizes.
class ProjectedEmbedder final : public DocumentEmbedder {
 public:
  ProjectedEmbedder(std::shared_ptr<const DocumentEmbedder> base, std::shared_ptr<const ProjectionHead> head);

  EmbeddingVector embed(const Document& doc) const override;
  std::size_t dim() const override { return head_->d_out; }
  std::string describe() const override { return base_->describe() + "+projection"; }

 private:
  std::shared_ptr<const DocumentEmbedder> base_;
  std::shared_ptr<const ProjectionHead> head_;
};

struct PoolingOptions {
  // Normalize each document vector before averaging.
  bool normalize_documents = false;
};

// Mean of the vectors, then L2 normalization. Throws kDegenerateEpisode when
// the mean is zero and kDimMismatch when dimensions differ.
EmbeddingVector pool_embeddings(std::span<const EmbeddingVector> vectors, PoolingOptions options = {});

EmbeddingVector embed_episode(const Episode& episode, const DocumentEmbedder& embedder,
                              PoolingOptions options = {});

}  // namespace stylodet
