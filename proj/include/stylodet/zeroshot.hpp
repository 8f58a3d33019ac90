#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "stylodet/common.hpp"
#include "stylodet/corpus.hpp"
#include "stylodet/tokenizer.hpp"

namespace stylodet {

// Statistics of the observed token at one position.
struct TokenStat {
  double prob = 0.0;
  std::size_t rank = 1;  // 1 = most probable; ties broken by ascending token id
  double entropy = 0.0;  // of the predictive distribution, nats
};

class TokenLikelihoodProvider {
 public:
  virtual ~TokenLikelihoodProvider() = default;
  virtual std::vector<TokenStat> token_stats(const Document& doc) const = 0;
};

struct NGramOptions {
  std::size_t order = 3;
  double alpha = 0.1;
};

// Additive-smoothed n-gram LM over tokenizer pieces. Id 0 is <unk>; the rest
// of the vocabulary is sorted bytewise. Contexts are left-padded with a
// begin marker that is never predicted. A context never seen in training
// predicts the uniform distribution.
class NGramLM final : public TokenLikelihoodProvider {
 public:
  static NGramLM train(std::span<const std::string> texts, const Tokenizer& tokenizer, NGramOptions options = {});

  std::vector<TokenStat> token_stats(const Document& doc) const override;
  std::vector<TokenStat> token_stats_for(std::string_view text) const;

  double probability(std::span<const std::int32_t> context, std::int32_t token) const;
  // Full conditional distribution, indexed by token id.
  std::vector<double> distribution(std::span<const std::int32_t> context) const;

  std::int32_t token_id(std::string_view piece) const;
  const std::string& piece(std::int32_t id) const { return vocab_[static_cast<std::size_t>(id)]; }
  std::size_t vocab_size() const { return vocab_.size(); }
  std::size_t order() const { return options_.order; }

  // Ancestral sampling of `length` tokens from the begin marker.
  std::vector<std::int32_t> sample(std::size_t length, Rng& rng) const;

 private:
  struct ContextCounts {
    std::uint64_t total = 0;
    std::map<std::int32_t, std::uint64_t> next;
  };
  static constexpr std::int32_t kBegin = -1;

  std::vector<std::int32_t> encode(std::string_view text) const;
  TokenStat stat_at(std::span<const std::int32_t> context, std::int32_t token) const;
  const ContextCounts* find(std::span<const std::int32_t> context) const;

  NGramOptions options_;
  Tokenizer tokenizer_;
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, std::int32_t> ids_;
  std::map<std::vector<std::int32_t>, ContextCounts> counts_;
};

// Statistics computed elsewhere (e.g. by a neural LM), one JSON object per
// line: {"id", "ranks":[...], "logprobs":[...], "entropies":[...]}.
class PrecomputedStats final : public TokenLikelihoodProvider {
 public:
  static PrecomputedStats load(std::istream& in);
  static PrecomputedStats load_file(const std::string& path);

  std::vector<TokenStat> token_stats(const Document& doc) const override;
  std::size_t size() const { return by_id_.size(); }

 private:
  std::unordered_map<std::string, std::vector<TokenStat>> by_id_;
};

enum class ZeroShotDetector { kRank, kLogRank, kEntropy };

ZeroShotDetector parse_zero_shot_detector(std::string_view name);
std::string_view zero_shot_detector_name(ZeroShotDetector d);

// Higher is more machine-like for all three:
//   rank    = -mean(rank)
//   logrank = -mean(ln rank)
//   entropy = -mean(entropy)
double rank_score(const Document& doc, const TokenLikelihoodProvider& provider);
double logrank_score(const Document& doc, const TokenLikelihoodProvider& provider);
double entropy_score(const Document& doc, const TokenLikelihoodProvider& provider);
double zero_shot_score(ZeroShotDetector detector, const Document& doc, const TokenLikelihoodProvider& provider);

// Mean of the per-document scores.
double zero_shot_episode_score(ZeroShotDetector detector, const Episode& episode,
                               const TokenLikelihoodProvider& provider);

}  // namespace stylodet
