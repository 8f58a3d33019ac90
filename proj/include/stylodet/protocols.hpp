#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "stylodet/embedder.hpp"
#include "stylodet/kernels.hpp"
#include "stylodet/scoring.hpp"
#include "stylodet/zeroshot.hpp"

namespace stylodet {

enum class Scorer { kCosine, kPrototype };
enum class Protocol { kSingle, kMulti, kUnknown };

Scorer parse_scorer(std::string_view name);
std::string_view scorer_name(Scorer s);
Aggregation parse_aggregation(std::string_view name);
std::string_view aggregation_name(Aggregation a);
Protocol parse_protocol(std::string_view name);
std::string_view protocol_name(Protocol p);

struct EvalConfig {
  std::size_t episode_size = 5;
  double max_fpr = 0.01;
  std::size_t trials = 1000;
  std::size_t bootstrap = 1000;
  std::uint64_t seed = 0;
  Scorer scorer = Scorer::kCosine;
  Aggregation aggregation = Aggregation::kMin;
  std::vector<double> paraphrase_proportions = {0.0, 0.25, 0.5, 0.75, 1.0};
  bool paraphrase_defended = true;
  bool parallel = true;
  bool keep_records = false;

  void validate() const;
  nlohmann::ordered_json to_json() const;
  // Missing keys keep their defaults; unknown keys are ignored.
  static EvalConfig from_json(const nlohmann::json& j);
};

struct MetricRow {
  std::string domain;
  std::string model;
  std::string metric;  // pauc | auc | fpr95
  double mean = 0.0;
  double se = 0.0;
  std::size_t n = 0;  // supports or trials

  friend bool operator==(const MetricRow&, const MetricRow&) = default;
};

struct EvalReport {
  std::string protocol;
  nlohmann::ordered_json config;
  std::vector<MetricRow> per_domain;
  std::vector<MetricRow> overall;
  std::vector<std::string> warnings;
  std::vector<ScoreRecord> records;  // only when keep_records
};

// Each machine episode of a (domain, model) in turn is the support; queries
// are the model's other episodes (label 1) and every human episode of the
// domain (label 0). Per-support metrics, bootstrap SE per support from
// resampling its (score, label) pairs, propagated to the mean as
// sqrt(sum se^2) / n.
EvalReport single_target_eval(std::span<const EmbeddedEpisode> episodes, const EvalConfig& config);

// Per domain and trial, one random support per model; every other episode is
// a query scored by aggregating over the supports (min by default). SE from
// a bootstrap over trial values.
EvalReport multi_target_eval(std::span<const EmbeddedEpisode> episodes, const EvalConfig& config);

// Per domain and trial, episode_size machine documents drawn uniformly (any
// model) pooled into the support; queries are the machine episodes that
// contributed no support document plus the human episodes.
EvalReport unknown_llm_eval(std::span<const EmbeddedEpisode> episodes, const EvalConfig& config);

EvalReport run_protocol(Protocol protocol, std::span<const EmbeddedEpisode> episodes, const EvalConfig& config);

// Original episode id -> its paraphrased copy.
using ParaphraseMap = std::map<std::string, EmbeddedEpisode>;

struct ParaphrasePoint {
  double proportion = 0.0;
  EvalReport undefended;
  std::optional<EvalReport> defended;
};

// Single-target evaluation where a seeded proportion of each support's
// machine queries is replaced by paraphrases. The defended mode scores
// min(cos(support, q), cos(paraphrase(support), q)).
std::vector<ParaphrasePoint> paraphrase_eval(std::span<const EmbeddedEpisode> episodes,
                                             const ParaphraseMap& paraphrases, const EvalConfig& config);

// Re-partitions the documents into episodes of each N and runs the protocol.
std::vector<std::pair<std::size_t, EvalReport>> sweep_n(const std::vector<Document>& documents,
                                                        const DocumentEmbedder& embedder, const EvalConfig& config,
                                                        std::span<const std::size_t> n_values, Protocol protocol);

// Support-free baseline: each (domain, model) compares that model's episodes
// (label 1) with the domain's human episodes (label 0) using the averaged
// per-document zero-shot score.
EvalReport zero_shot_eval(std::span<const Episode> episodes, const TokenLikelihoodProvider& provider,
                          ZeroShotDetector detector, const EvalConfig& config);

}  // namespace stylodet
