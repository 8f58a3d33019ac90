#include "stylodet/embedder.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "stylodet/common.hpp"
#include "stylodet/utf8.hpp"

namespace stylodet {

void FeaturizerConfig::validate() const {
  if (buckets < 256 || (buckets & (buckets - 1)) != 0) {
    throw Error(Errc::kInvalidArgument, "buckets must be a power of two >= 256");
  }
  if (ngram_orders.empty()) throw Error(Errc::kInvalidArgument, "at least one n-gram order is required");
  for (int n : ngram_orders) {
    if (n < 1) throw Error(Errc::kInvalidArgument, "n-gram orders must be >= 1");
  }
  if (ngram_weight < 0 || function_word_weight < 0 || statistics_weight < 0) {
    throw Error(Errc::kInvalidArgument, "block weights must be non-negative");
  }
  if (projection) {
    projection->validate();
    if (projection->d_in != feature_dim()) {
      throw Error(Errc::kDimMismatch, "projection input dim " + std::to_string(projection->d_in) +
                                          " does not match feature dim " + std::to_string(feature_dim()));
    }
  }
}

StylometricFeaturizer::StylometricFeaturizer(FeaturizerConfig config) : config_(std::move(config)) {
  config_.validate();
  for (std::size_t i = 0; i < config_.function_words.size(); ++i) {
    word_index_.emplace(utf8::ascii_lower(config_.function_words[i]), i);
  }
}

std::string StylometricFeaturizer::describe() const {
  std::string orders;
  for (int n : config_.ngram_orders) orders += (orders.empty() ? "" : ",") + std::to_string(n);
  return "stylometric(orders=" + orders + ";buckets=" + std::to_string(config_.buckets) +
         ";function_words=" + std::to_string(config_.function_words.size()) +
         (config_.projection ? ";projection=" + std::to_string(config_.projection->d_out) : "") + ")";
}

namespace {

bool is_quote(char32_t cp) {
  return cp == U'"' || cp == U'\'' || cp == U'“' || cp == U'”' || cp == U'‘' || cp == U'’';
}

bool is_dash(char32_t cp) { return cp == U'-' || cp == U'–' || cp == U'—'; }

struct Word {
  std::string lower;
  std::size_t letters = 0;
  bool capitalized = false;
};

// Runs of letters, digits and inner apostrophes; curly apostrophes fold to '.
std::vector<Word> extract_words(std::string_view text) {
  std::vector<Word> words;
  Word current;
  bool in_word = false;
  std::string pending_apostrophe;
  for (std::size_t pos = 0; pos < text.size();) {
    const auto d = utf8::decode(text, pos);
    pos += d.length;
    const bool wordish = utf8::is_letter(d.cp) || utf8::is_digit(d.cp);
    if (wordish) {
      if (!in_word) {
        current = Word{};
        current.capitalized = utf8::is_upper(d.cp);
        in_word = true;
      }
      current.lower += pending_apostrophe;
      pending_apostrophe.clear();
      std::string piece;
      utf8::append(piece, d.cp);
      current.lower += utf8::ascii_lower(piece);
      ++current.letters;
    } else if (in_word && (d.cp == U'\'' || d.cp == U'’') && pending_apostrophe.empty()) {
      pending_apostrophe = "'";
    } else {
      if (in_word) words.push_back(std::move(current));
      in_word = false;
      pending_apostrophe.clear();
    }
  }
  if (in_word) words.push_back(std::move(current));
  return words;
}

void normalize_block(std::vector<double>& block) {
  double sq = 0.0;
  for (double x : block) sq += x * x;
  if (sq == 0.0) return;
  const double inv = 1.0 / std::sqrt(sq);
  for (double& x : block) x *= inv;
}

}  // namespace

StylometricFeaturizer::Blocks StylometricFeaturizer::blocks(std::string_view text) const {
  Blocks out;
  out.ngrams.assign(config_.buckets, 0.0);
  out.function_words.assign(config_.function_words.size(), 0.0);
  out.statistics.assign(kStatisticsFeatures, 0.0);

  // Code points with whitespace runs folded to a single space; offsets index
  // the folded UTF-8 string.
  std::string folded;
  std::vector<std::size_t> starts;
  bool prev_space = false;
  for (std::size_t pos = 0; pos < text.size();) {
    const auto d = utf8::decode(text, pos);
    pos += d.length;
    const bool space = utf8::is_space(d.cp);
    if (space && prev_space) continue;
    starts.push_back(folded.size());
    utf8::append(folded, space ? U' ' : d.cp);
    prev_space = space;
  }
  starts.push_back(folded.size());
  const std::size_t n_chars = starts.size() - 1;

  const std::uint64_t mask = config_.buckets - 1;
  double total_ngrams = 0.0;
  for (int order : config_.ngram_orders) {
    const auto n = static_cast<std::size_t>(order);
    if (n > n_chars) continue;
    const char tag = static_cast<char>('0' + (order % 64));
    const std::uint64_t seeded = fnv1a64(std::string_view(&tag, 1));
    for (std::size_t i = 0; i + n <= n_chars; ++i) {
      const auto gram = std::string_view(folded).substr(starts[i], starts[i + n] - starts[i]);
      out.ngrams[fnv1a64(gram, seeded) & mask] += 1.0;
      total_ngrams += 1.0;
    }
  }
  if (total_ngrams > 0) {
    for (double& x : out.ngrams) x /= total_ngrams;
  }

  const auto words = extract_words(text);
  const double n_words = static_cast<double>(words.size());
  if (!words.empty()) {
    for (const auto& w : words) {
      if (const auto it = word_index_.find(w.lower); it != word_index_.end()) out.function_words[it->second] += 1.0;
    }
    for (double& x : out.function_words) x /= n_words;
  }

  // Surface statistics, each scaled to roughly unit range.
  double letters = 0, upper = 0, digits = 0, punct = 0, non_space = 0, non_ascii = 0;
  double commas = 0, periods = 0, exclaim_question = 0, colons = 0, quotes = 0, dashes = 0, parens = 0;
  for (std::size_t pos = 0; pos < text.size();) {
    const auto d = utf8::decode(text, pos);
    pos += d.length;
    if (utf8::is_space(d.cp)) continue;
    non_space += 1;
    if (d.cp >= 0x80) non_ascii += 1;
    if (utf8::is_letter(d.cp)) {
      letters += 1;
      if (utf8::is_upper(d.cp)) upper += 1;
    }
    if (utf8::is_digit(d.cp)) digits += 1;
    if (utf8::is_punctuation(d.cp)) punct += 1;
    if (d.cp == U',') commas += 1;
    if (d.cp == U'.') periods += 1;
    if (d.cp == U'!' || d.cp == U'?') exclaim_question += 1;
    if (d.cp == U';' || d.cp == U':') colons += 1;
    if (is_quote(d.cp)) quotes += 1;
    if (is_dash(d.cp)) dashes += 1;
    if (d.cp == U'(' || d.cp == U')') parens += 1;
  }

  auto& s = out.statistics;
  if (!words.empty()) {
    double sum = 0, sum_sq = 0, capitalized = 0;
    std::unordered_set<std::string> types;
    for (const auto& w : words) {
      const auto len = static_cast<double>(w.letters);
      sum += len;
      sum_sq += len * len;
      if (w.capitalized) capitalized += 1;
      types.insert(w.lower);
    }
    const double mean = sum / n_words;
    const double var = std::max(0.0, sum_sq / n_words - mean * mean);
    const double sentences = static_cast<double>(std::max<std::size_t>(1, segment_sentences(text).size()));
    s[0] = mean / 10.0;
    s[1] = std::sqrt(var) / 10.0;
    s[2] = n_words / sentences / 50.0;
    s[6] = commas / n_words;
    s[7] = periods / n_words;
    s[8] = exclaim_question / n_words;
    s[9] = colons / n_words;
    s[10] = quotes / n_words;
    s[11] = dashes / n_words;
    s[12] = parens / n_words;
    s[13] = static_cast<double>(types.size()) / n_words;
    s[14] = capitalized / n_words;
  }
  if (letters > 0) s[3] = upper / letters;
  if (non_space > 0) {
    s[4] = digits / non_space;
    s[5] = punct / non_space;
    s[15] = non_ascii / non_space;
  }
  return out;
}

EmbeddingVector StylometricFeaturizer::features(std::string_view text) const {
  auto b = blocks(text);
  normalize_block(b.ngrams);
  normalize_block(b.function_words);
  normalize_block(b.statistics);

  std::vector<double> joined;
  joined.reserve(config_.feature_dim());
  for (double x : b.ngrams) joined.push_back(x * config_.ngram_weight);
  for (double x : b.function_words) joined.push_back(x * config_.function_word_weight);
  for (double x : b.statistics) joined.push_back(x * config_.statistics_weight);
  return normalized(std::span<const double>(joined));
}

EmbeddingVector StylometricFeaturizer::embed_text(std::string_view text) const {
  auto base = features(text);
  if (!config_.projection) return base;
  const auto projected = config_.projection->apply(base.values);
  return normalized(std::span<const double>(projected));
}

StoreEmbedder::StoreEmbedder(std::size_t dim, std::unordered_map<std::string, EmbeddingVector> by_id)
    : dim_(dim), by_id_(std::move(by_id)) {
  for (const auto& [id, v] : by_id_) {
    if (v.dim() != dim_) throw Error(Errc::kDimMismatch, "embedding for '" + id + "' has wrong dim");
  }
}

EmbeddingVector StoreEmbedder::embed(const Document& doc) const {
  const auto it = by_id_.find(doc.id);
  if (it == by_id_.end()) throw Error(Errc::kInsufficientData, "no stored embedding for document '" + doc.id + "'");
  return it->second;
}

ProjectedEmbedder::ProjectedEmbedder(std::shared_ptr<const DocumentEmbedder> base,
                                     std::shared_ptr<const ProjectionHead> head)
    : base_(std::move(base)), head_(std::move(head)) {
  head_->validate();
  if (head_->d_in != base_->dim()) throw Error(Errc::kDimMismatch, "projection input dim does not match base embedder");
}

EmbeddingVector ProjectedEmbedder::embed(const Document& doc) const {
  const auto y = head_->apply(base_->embed(doc).values);
  return normalized(std::span<const double>(y));
}

EmbeddingVector pool_embeddings(std::span<const EmbeddingVector> vectors, PoolingOptions options) {
  if (vectors.empty()) throw Error(Errc::kDegenerateEpisode, "degenerate episode");
  const std::size_t dim = vectors.front().dim();
  // Summing in lexicographic order makes the result bit-identical under any
  // permutation of the input.
  std::vector<const EmbeddingVector*> order;
  order.reserve(vectors.size());
  for (const auto& v : vectors) {
    if (v.dim() != dim) throw Error(Errc::kDimMismatch, "episode documents have different embedding dims");
    order.push_back(&v);
  }
  std::sort(order.begin(), order.end(), [](const EmbeddingVector* a, const EmbeddingVector* b) {
    return std::lexicographical_compare(a->values.begin(), a->values.end(), b->values.begin(), b->values.end());
  });
  std::vector<double> sum(dim, 0.0);
  for (const auto* vp : order) {
    const auto& v = *vp;
    const double scale = options.normalize_documents ? 1.0 / l2_norm(v.values) : 1.0;
    if (!std::isfinite(scale)) throw Error(Errc::kDegenerateEpisode, "degenerate episode");
    for (std::size_t i = 0; i < dim; ++i) sum[i] += static_cast<double>(v.values[i]) * scale;
  }
  const double inv_n = 1.0 / static_cast<double>(vectors.size());
  for (double& x : sum) x *= inv_n;
  return normalized(std::span<const double>(sum));
}

EmbeddingVector embed_episode(const Episode& episode, const DocumentEmbedder& embedder, PoolingOptions options) {
  std::vector<EmbeddingVector> vectors;
  vectors.reserve(episode.documents.size());
  for (const auto& doc : episode.documents) vectors.push_back(embedder.embed(doc));
  return pool_embeddings(vectors, options);
}

}  // namespace stylodet
