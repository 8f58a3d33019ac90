#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "stylodet/tokenizer.hpp"

namespace stylodet {

enum class SourceKind { kHuman, kMachine };

struct SourceLabel {
  SourceKind kind = SourceKind::kHuman;
  std::string model_name;  // empty for human authors

  static SourceLabel human() { return {}; }
  static SourceLabel machine(std::string model);
  // "human" (case-sensitive) or a model name.
  static SourceLabel parse(std::string_view label);

  bool is_machine() const { return kind == SourceKind::kMachine; }
  // Inverse of parse().
  std::string label() const { return is_machine() ? model_name : "human"; }

  friend bool operator==(const SourceLabel&, const SourceLabel&) = default;
  friend auto operator<=>(const SourceLabel&, const SourceLabel&) = default;
};

struct Document {
  std::string id;
  std::string text;
  std::string author;
  SourceLabel source;
  std::string domain;
  std::optional<std::int64_t> timestamp;
  std::size_t token_count = 0;
  bool hard_cut = false;  // truncated mid-sentence

  friend bool operator==(const Document&, const Document&) = default;
};

struct Episode {
  std::string id;
  std::vector<Document> documents;
  std::string author;
  SourceLabel source;
  std::string domain;

  std::size_t size() const { return documents.size(); }
  friend bool operator==(const Episode&, const Episode&) = default;
};

// ---- sentence segmentation ----

struct ByteSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  friend bool operator==(const ByteSpan&, const ByteSpan&) = default;
};

class SentenceSegmenter {
 public:
  // Uses the built-in English abbreviation list.
  SentenceSegmenter();
  explicit SentenceSegmenter(std::set<std::string> abbreviations);

  // Lowercased abbreviations without the final period, one per line; '#'
  // starts a comment. Entries extend the default list.
  static SentenceSegmenter with_abbreviation_file(const std::string& path);

  // Sentences as disjoint, ordered byte spans trimmed of surrounding
  // whitespace. A sentence ends after a run of terminal marks (. ! ? and
  // U+2026) plus closing quotes/brackets when whitespace or end-of-text
  // follows, unless the mark is the period of an abbreviation or initial.
  std::vector<ByteSpan> segment(std::string_view text) const;

  const std::set<std::string>& abbreviations() const { return abbreviations_; }

 private:
  bool suppressed(std::string_view text, std::size_t period_pos) const;

  std::set<std::string> abbreviations_;
};

std::vector<ByteSpan> segment_sentences(std::string_view text);

struct Truncation {
  std::string text;
  std::size_t token_count = 0;
  bool hard_cut = false;
};

// Longest prefix ending at a sentence boundary with at most max_tokens
// tokens; falls back to the first max_tokens tokens (hard_cut) when the first
// sentence alone is too long.
Truncation truncate_to_boundary(std::string_view text, std::size_t max_tokens,
                                const Tokenizer& tokenizer,
                                const SentenceSegmenter& segmenter = SentenceSegmenter{});

// ---- ingestion ----

struct CorpusConfig {
  std::size_t max_tokens = 128;
  TokenizerSpec tokenizer;
  std::string abbreviations_path;

  // key = value lines: max_tokens, tokenizer (word|bpe), vocab, merges,
  // abbreviations. Unknown keys are rejected.
  static CorpusConfig parse(std::string_view text);
  static CorpusConfig load(const std::string& path);
};

struct IngestOptions {
  std::size_t max_tokens = 128;
  bool parallel = true;
  std::string source_name = "<input>";  // used in error messages
};

// Line-delimited JSON: {"id","text","author","label","domain","timestamp"?}.
// Blank lines are skipped. Errors carry the 1-based line number.
std::vector<Document> ingest_corpus(std::istream& in, const Tokenizer& tokenizer,
                                    const SentenceSegmenter& segmenter, const IngestOptions& options);
std::vector<Document> ingest_corpus_file(const std::string& path, const Tokenizer& tokenizer,
                                         const SentenceSegmenter& segmenter, IngestOptions options);

// Groups documents by (author, source, domain), shuffles each group with a
// stream derived from the seed and the group key, and cuts consecutive
// episodes of exactly n documents. Remainders are dropped. Groups are
// emitted in sorted key order.
std::vector<Episode> build_episodes(const std::vector<Document>& docs, std::size_t n, std::uint64_t seed);

// Seeded down-sampling of the majority class; survivors keep input order.
std::vector<Document> balance_corpus(const std::vector<Document>& docs, std::uint64_t seed);

}  // namespace stylodet
