#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace stylodet {

enum class TokenizerMode { kBuiltinWord, kSubwordBpe };

struct TokenizerSpec {
  TokenizerMode mode = TokenizerMode::kBuiltinWord;
  std::string vocab_path;   // SubwordBPE only
  std::string merges_path;  // SubwordBPE only
};

// Half-open byte range into the tokenized text.
struct TokenSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  friend bool operator==(const TokenSpan&, const TokenSpan&) = default;
};

// GPT-2 style byte-level BPE model (vocab.json + merges.txt).
class BpeModel {
 public:
  static std::shared_ptr<const BpeModel> load(const std::string& vocab_path,
                                              const std::string& merges_path);
  static std::shared_ptr<const BpeModel> from_strings(std::string_view vocab_json,
                                                      std::string_view merges_text);

  // Splits one pre-token into merged pieces, each given as a byte range
  // relative to the pre-token.
  std::vector<TokenSpan> encode_word(std::string_view word) const;

  // Id of a byte-level piece, or -1 when the piece is not in the vocabulary.
  std::int64_t piece_id(std::string_view raw_bytes) const;

  std::size_t vocab_size() const { return vocab_.size(); }

 private:
  std::unordered_map<std::string, std::int64_t> vocab_;  // byte-level unicode form
  std::map<std::pair<std::string, std::string>, std::size_t> ranks_;
};

// GPT-2 pre-tokenization ('s|'t|'re|'ve|'m|'ll|'d| ?\p{L}+| ?\p{N}+|
// ?[^\s\p{L}\p{N}]+|\s+(?!\S)|\s+) with the letter class approximated by
// utf8::is_letter.
std::vector<TokenSpan> gpt2_pretokenize(std::string_view text);

// Maps raw bytes to GPT-2's printable byte-level alphabet.
std::string byte_level_encode(std::string_view raw);

class Tokenizer {
 public:
  // Whitespace-separated words with punctuation attached; CJK ideographs and
  // kana form one token each.
  Tokenizer() = default;

  static Tokenizer from_spec(const TokenizerSpec& spec);
  static Tokenizer bpe(std::shared_ptr<const BpeModel> model);

  std::vector<TokenSpan> tokenize(std::string_view text) const;
  std::size_t count(std::string_view text) const { return tokenize(text).size(); }

  // Token surface strings (the raw text of each span).
  std::vector<std::string> pieces(std::string_view text) const;

  TokenizerMode mode() const { return bpe_ ? TokenizerMode::kSubwordBpe : TokenizerMode::kBuiltinWord; }

 private:
  std::shared_ptr<const BpeModel> bpe_;
};

}  // namespace stylodet
