#include "stylodet/zeroshot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

namespace stylodet {

// ---- n-gram LM ----

NGramLM NGramLM::train(std::span<const std::string> texts, const Tokenizer& tokenizer, NGramOptions options) {
  if (options.order < 1) throw Error(Errc::kInvalidArgument, "n-gram order must be >= 1");
  if (!(options.alpha > 0.0)) throw Error(Errc::kInvalidArgument, "smoothing constant must be positive");
  NGramLM lm;
  lm.options_ = options;
  lm.tokenizer_ = tokenizer;

  std::vector<std::vector<std::string>> tokenized;
  std::set<std::string> pieces;
  for (const auto& t : texts) {
    tokenized.push_back(tokenizer.pieces(t));
    pieces.insert(tokenized.back().begin(), tokenized.back().end());
  }
  if (pieces.empty()) throw Error(Errc::kInsufficientData, "empty corpus: no tokens to train on");
  pieces.erase("<unk>");
  lm.vocab_.push_back("<unk>");
  lm.vocab_.insert(lm.vocab_.end(), pieces.begin(), pieces.end());
  for (std::size_t i = 0; i < lm.vocab_.size(); ++i) lm.ids_.emplace(lm.vocab_[i], static_cast<std::int32_t>(i));

  const std::size_t ctx_len = options.order - 1;
  for (const auto& toks : tokenized) {
    std::vector<std::int32_t> seq(ctx_len, kBegin);
    for (const auto& p : toks) seq.push_back(lm.ids_.at(p));
    for (std::size_t i = ctx_len; i < seq.size(); ++i) {
      std::vector<std::int32_t> ctx(seq.begin() + static_cast<std::ptrdiff_t>(i - ctx_len),
                                    seq.begin() + static_cast<std::ptrdiff_t>(i));
      auto& c = lm.counts_[ctx];
      c.total += 1;
      c.next[seq[i]] += 1;
    }
  }
  return lm;
}

std::int32_t NGramLM::token_id(std::string_view piece) const {
  auto it = ids_.find(std::string(piece));
  return it == ids_.end() ? 0 : it->second;
}

const NGramLM::ContextCounts* NGramLM::find(std::span<const std::int32_t> context) const {
  if (context.size() != options_.order - 1) throw Error(Errc::kInvalidArgument, "context length must be order - 1");
  auto it = counts_.find(std::vector<std::int32_t>(context.begin(), context.end()));
  return it == counts_.end() ? nullptr : &it->second;
}

double NGramLM::probability(std::span<const std::int32_t> context, std::int32_t token) const {
  const auto* c = find(context);
  const double v = static_cast<double>(vocab_.size());
  if (!c) return 1.0 / v;
  auto it = c->next.find(token);
  const double count = it == c->next.end() ? 0.0 : static_cast<double>(it->second);
  return (count + options_.alpha) / (static_cast<double>(c->total) + options_.alpha * v);
}

std::vector<double> NGramLM::distribution(std::span<const std::int32_t> context) const {
  const auto* c = find(context);
  const double v = static_cast<double>(vocab_.size());
  if (!c) return std::vector<double>(vocab_.size(), 1.0 / v);
  const double denom = static_cast<double>(c->total) + options_.alpha * v;
  std::vector<double> p(vocab_.size(), options_.alpha / denom);
  for (const auto& [id, n] : c->next) p[static_cast<std::size_t>(id)] = (static_cast<double>(n) + options_.alpha) / denom;
  return p;
}

TokenStat NGramLM::stat_at(std::span<const std::int32_t> context, std::int32_t token) const {
  const auto* c = find(context);
  const std::size_t v = vocab_.size();
  TokenStat s;
  if (!c) {
    s.prob = 1.0 / static_cast<double>(v);
    s.rank = static_cast<std::size_t>(token) + 1;
    s.entropy = std::log(static_cast<double>(v));
    return s;
  }
  const double denom = static_cast<double>(c->total) + options_.alpha * static_cast<double>(v);
  auto it = c->next.find(token);
  const std::uint64_t observed = it == c->next.end() ? 0 : it->second;
  s.prob = (static_cast<double>(observed) + options_.alpha) / denom;

  // Probability is monotone in the count, so rank by integer counts.
  std::size_t better = 0;
  std::size_t seen_below = 0;
  double entropy = 0.0;
  for (const auto& [id, n] : c->next) {
    if (n > observed || (n == observed && id < token)) ++better;
    if (id < token) ++seen_below;
    const double p = (static_cast<double>(n) + options_.alpha) / denom;
    entropy -= p * std::log(p);
  }
  const std::size_t unseen = v - c->next.size();
  if (observed == 0) better += static_cast<std::size_t>(token) - seen_below;  // unseen ids below, tied at zero
  s.rank = better + 1;
  const double p0 = options_.alpha / denom;
  entropy -= static_cast<double>(unseen) * p0 * std::log(p0);
  s.entropy = std::max(0.0, entropy);
  return s;
}

std::vector<std::int32_t> NGramLM::encode(std::string_view text) const {
  std::vector<std::int32_t> ids;
  for (const auto& p : tokenizer_.pieces(text)) ids.push_back(token_id(p));
  return ids;
}

std::vector<TokenStat> NGramLM::token_stats_for(std::string_view text) const {
  const std::size_t ctx_len = options_.order - 1;
  std::vector<std::int32_t> seq(ctx_len, kBegin);
  const auto ids = encode(text);
  seq.insert(seq.end(), ids.begin(), ids.end());
  std::vector<TokenStat> out;
  out.reserve(ids.size());
  for (std::size_t i = ctx_len; i < seq.size(); ++i) {
    out.push_back(stat_at(std::span<const std::int32_t>(seq).subspan(i - ctx_len, ctx_len), seq[i]));
  }
  return out;
}

std::vector<TokenStat> NGramLM::token_stats(const Document& doc) const { return token_stats_for(doc.text); }

std::vector<std::int32_t> NGramLM::sample(std::size_t length, Rng& rng) const {
  const std::size_t ctx_len = options_.order - 1;
  std::vector<std::int32_t> seq(ctx_len, kBegin);
  for (std::size_t i = 0; i < length; ++i) {
    const auto p = distribution(std::span<const std::int32_t>(seq).last(ctx_len));
    const double u = rng.uniform01();
    double acc = 0.0;
    std::int32_t pick = static_cast<std::int32_t>(p.size()) - 1;
    for (std::size_t t = 0; t < p.size(); ++t) {
      acc += p[t];
      if (u < acc) {
        pick = static_cast<std::int32_t>(t);
        break;
      }
    }
    seq.push_back(pick);
  }
  return {seq.begin() + static_cast<std::ptrdiff_t>(ctx_len), seq.end()};
}

// ---- precomputed statistics ----

PrecomputedStats PrecomputedStats::load(std::istream& in) {
  PrecomputedStats out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = "stats line " + std::to_string(line_no) + ": ";
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::kMalformedRecord, where + e.what());
    }
    try {
      const auto id = j.at("id").get<std::string>();
      const auto ranks = j.at("ranks").get<std::vector<double>>();
      const auto logprobs = j.at("logprobs").get<std::vector<double>>();
      const auto entropies = j.at("entropies").get<std::vector<double>>();
      if (ranks.size() != logprobs.size() || ranks.size() != entropies.size()) {
        throw Error(Errc::kMalformedRecord, where + "ranks, logprobs and entropies differ in length");
      }
      std::vector<TokenStat> stats(ranks.size());
      for (std::size_t i = 0; i < ranks.size(); ++i) {
        if (!(ranks[i] >= 1.0) || ranks[i] != std::floor(ranks[i])) {
          throw Error(Errc::kMalformedRecord, where + "ranks must be integers >= 1");
        }
        if (!(logprobs[i] <= 0.0) || !std::isfinite(logprobs[i])) {
          throw Error(Errc::kMalformedRecord, where + "logprobs must be finite and <= 0");
        }
        if (!(entropies[i] >= 0.0) || !std::isfinite(entropies[i])) {
          throw Error(Errc::kMalformedRecord, where + "entropies must be finite and >= 0");
        }
        stats[i] = {std::exp(logprobs[i]), static_cast<std::size_t>(ranks[i]), entropies[i]};
      }
      if (!out.by_id_.emplace(id, std::move(stats)).second) {
        throw Error(Errc::kDuplicateId, where + "duplicate id '" + id + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::kMalformedRecord, where + e.what());
    }
  }
  return out;
}

PrecomputedStats PrecomputedStats::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIo, "cannot open " + path);
  return load(in);
}

std::vector<TokenStat> PrecomputedStats::token_stats(const Document& doc) const {
  auto it = by_id_.find(doc.id);
  if (it == by_id_.end()) throw Error(Errc::kInsufficientData, "no token statistics for document '" + doc.id + "'");
  return it->second;
}

// ---- detectors ----

ZeroShotDetector parse_zero_shot_detector(std::string_view name) {
  if (name == "rank") return ZeroShotDetector::kRank;
  if (name == "logrank") return ZeroShotDetector::kLogRank;
  if (name == "entropy") return ZeroShotDetector::kEntropy;
  throw Error(Errc::kInvalidArgument, "unknown detector '" + std::string(name) + "' (rank|logrank|entropy)");
}

std::string_view zero_shot_detector_name(ZeroShotDetector d) {
  switch (d) {
    case ZeroShotDetector::kRank: return "rank";
    case ZeroShotDetector::kLogRank: return "logrank";
    case ZeroShotDetector::kEntropy: return "entropy";
  }
  return "rank";
}

namespace {

template <typename F>
double negated_mean(const Document& doc, const TokenLikelihoodProvider& provider, F value) {
  const auto stats = provider.token_stats(doc);
  if (stats.empty()) throw Error(Errc::kInsufficientData, "document '" + doc.id + "' has no scorable position");
  double sum = 0.0;
  for (const auto& s : stats) sum += value(s);
  return -sum / static_cast<double>(stats.size());
}

}  // namespace

double rank_score(const Document& doc, const TokenLikelihoodProvider& provider) {
  return negated_mean(doc, provider, [](const TokenStat& s) { return static_cast<double>(s.rank); });
}

double logrank_score(const Document& doc, const TokenLikelihoodProvider& provider) {
  return negated_mean(doc, provider, [](const TokenStat& s) { return std::log(static_cast<double>(s.rank)); });
}

double entropy_score(const Document& doc, const TokenLikelihoodProvider& provider) {
  return negated_mean(doc, provider, [](const TokenStat& s) { return s.entropy; });
}

double zero_shot_score(ZeroShotDetector detector, const Document& doc, const TokenLikelihoodProvider& provider) {
  switch (detector) {
    case ZeroShotDetector::kRank: return rank_score(doc, provider);
    case ZeroShotDetector::kLogRank: return logrank_score(doc, provider);
    case ZeroShotDetector::kEntropy: return entropy_score(doc, provider);
  }
  return rank_score(doc, provider);
}

double zero_shot_episode_score(ZeroShotDetector detector, const Episode& episode,
                               const TokenLikelihoodProvider& provider) {
  if (episode.documents.empty()) throw Error(Errc::kInvalidArgument, "empty episode");
  double sum = 0.0;
  for (const auto& d : episode.documents) sum += zero_shot_score(detector, d, provider);
  return sum / static_cast<double>(episode.documents.size());
}

}  // namespace stylodet
