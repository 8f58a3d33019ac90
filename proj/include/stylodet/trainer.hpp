#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "stylodet/common.hpp"
#include "stylodet/corpus.hpp"
#include "stylodet/embedder.hpp"
#include "stylodet/embedding.hpp"
#include "stylodet/store.hpp"

namespace stylodet {

enum class BatchComposition { kNone, kHalfHumanHalfMachine, kAllDomainsPresent };

struct ContrastiveConfig {
  double temperature = 0.1;
  std::size_t batch_pairs = 8;
  std::size_t steps = 100;
  double learning_rate = 0.5;
  std::uint64_t seed = 0;
  BatchComposition batch_composition = BatchComposition::kNone;
  std::size_t output_dim = 256;

  void validate() const;
};

// Indices into the episode list passed to sample_contrastive_batch.
struct ContrastivePair {
  std::size_t anchor = 0;
  std::size_t positive = 0;
  friend bool operator==(const ContrastivePair&, const ContrastivePair&) = default;
};

// One (anchor, positive) pair per author, all authors distinct so that the
// other pairs act as negatives. When every document of both episodes carries
// a timestamp, the two episodes must cover disjoint time ranges; otherwise
// any two distinct episodes qualify.
std::vector<ContrastivePair> sample_contrastive_batch(std::span<const Episode> episodes,
                                                      const ContrastiveConfig& config, Rng& rng);

struct InfoNceResult {
  double loss = 0.0;
  std::vector<std::vector<double>> anchor_grads;
  std::vector<std::vector<double>> positive_grads;
};

// loss = (1/M) sum_i -log softmax_j(cos(a_i, p_j) / tau)[i], with exact
// gradients of that expression with respect to every input coordinate.
InfoNceResult info_nce_loss(std::span<const std::vector<double>> anchors,
                            std::span<const std::vector<double>> positives, double temperature);

struct TrainLogEntry {
  std::size_t step = 0;
  double loss = 0.0;
};

struct ProjectionTraining {
  ProjectionHead head;
  std::vector<TrainLogEntry> log;
};

// Seeded Gaussian initialization with variance 1/d_in.
ProjectionHead init_projection(std::size_t d_in, std::size_t d_out, std::uint64_t seed);

// Plain SGD on the InfoNCE loss of projected, pooled episode embeddings.
ProjectionTraining train_projection(std::span<const Episode> episodes, const DocumentEmbedder& base,
                                    const ContrastiveConfig& config);
// Same, from precomputed base episode embeddings (one per episode).
ProjectionTraining train_projection(std::span<const Episode> episodes, std::span<const EmbeddingVector> base,
                                    const ContrastiveConfig& config);

// Mean InfoNCE loss of a head over fixed pairs.
double projection_loss(const ProjectionHead& head, std::span<const EmbeddingVector> base,
                       std::span<const ContrastivePair> pairs, double temperature);

void write_train_log(std::ostream& out, std::span<const TrainLogEntry> log);

// ---- Platt scaling ----

struct PlattCalibrator {
  double a = 0.0;
  double b = 0.0;

  // p increases with the score exactly when a < 0.
  bool increasing() const { return a < 0.0; }
  friend bool operator==(const PlattCalibrator&, const PlattCalibrator&) = default;
};

struct PlattOptions {
  std::size_t max_iterations = 100;
  double gradient_tolerance = 1e-10;
};

// Newton's method with backtracking on the sigmoid likelihood with smoothed
// targets t+ = (N+ + 1)/(N+ + 2) and t- = 1/(N- + 2).
PlattCalibrator fit_platt(std::span<const double> scores, std::span<const int> labels, PlattOptions options = {});
double apply_platt(const PlattCalibrator& cal, double score);

// ---- supervised head on frozen embeddings ----

struct LogisticHead {
  std::vector<double> w;
  double b = 0.0;

  double logit(std::span<const float> x) const;
  double probability(std::span<const float> x) const;
  friend bool operator==(const LogisticHead&, const LogisticHead&) = default;
};

struct LogisticOptions {
  double l2_penalty = 1e-4;
  std::size_t max_iterations = 5000;
  double gradient_tolerance = 1e-9;
  std::uint64_t seed = 0;
};

struct LogisticLoss {
  double loss = 0.0;
  std::vector<double> grad_w;
  double grad_b = 0.0;
};

// (1/n) sum log(1 + exp(-y' z)) + (l2/2) |w|^2 with y' in {-1, +1}; the bias
// is not penalized.
LogisticLoss logistic_loss(const LogisticHead& head, std::span<const EmbeddingVector> x, std::span<const int> labels,
                           double l2_penalty);

LogisticHead train_logistic_head(std::span<const EmbeddingRecord> records, std::span<const int> labels,
                                 const LogisticOptions& options);
LogisticHead train_logistic_head(std::span<const EmbeddingVector> x, std::span<const int> labels,
                                 const LogisticOptions& options);

// ---- head files ("HEAD" container) ----

void write_projection(const std::string& path, const ProjectionHead& head);
ProjectionHead read_projection(const std::string& path);
void write_platt(const std::string& path, const PlattCalibrator& cal);
PlattCalibrator read_platt(const std::string& path);
void write_logistic(const std::string& path, const LogisticHead& head);
LogisticHead read_logistic(const std::string& path);

}  // namespace stylodet
