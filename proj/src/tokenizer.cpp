#include "stylodet/tokenizer.hpp"

#include <array>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "stylodet/common.hpp"
#include "stylodet/utf8.hpp"

namespace stylodet {

namespace {

// GPT-2 bytes_to_unicode table.
const std::array<std::string, 256>& byte_alphabet() {
  static const std::array<std::string, 256> table = [] {
    std::array<std::string, 256> t;
    char32_t next = 256;
    for (int b = 0; b < 256; ++b) {
      const bool printable = (b >= '!' && b <= '~') || (b >= 0xA1 && b <= 0xAC) || (b >= 0xAE && b <= 0xFF);
      std::string s;
      utf8::append(s, printable ? static_cast<char32_t>(b) : next++);
      t[static_cast<std::size_t>(b)] = std::move(s);
    }
    return t;
  }();
  return table;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIo, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

enum class CharClass { kSpace, kLetter, kNumber, kOther };

CharClass classify(char32_t cp) {
  if (utf8::is_space(cp)) return CharClass::kSpace;
  if (utf8::is_digit(cp)) return CharClass::kNumber;
  if (utf8::is_letter(cp)) return CharClass::kLetter;
  return CharClass::kOther;
}

std::size_t match_contraction(std::string_view text, std::size_t pos) {
  if (text[pos] != '\'') return 0;
  static constexpr std::string_view kSuffixes[] = {"re", "ve", "ll", "s", "t", "m", "d"};
  const auto rest = text.substr(pos + 1);
  for (auto suffix : kSuffixes) {
    if (rest.substr(0, suffix.size()) == suffix) return suffix.size() + 1;
  }
  return 0;
}

}  // namespace

std::string byte_level_encode(std::string_view raw) {
  const auto& table = byte_alphabet();
  std::string out;
  out.reserve(raw.size() * 2);
  for (unsigned char c : raw) out += table[c];
  return out;
}

std::vector<TokenSpan> gpt2_pretokenize(std::string_view text) {
  std::vector<TokenSpan> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (const auto n = match_contraction(text, pos); n > 0) {
      out.push_back({pos, pos + n});
      pos += n;
      continue;
    }
    const auto first = utf8::decode(text, pos);
    std::size_t start = pos;
    std::size_t body = pos;
    CharClass cls = classify(first.cp);
    if (first.cp == U' ' && pos + 1 < text.size()) {
      const auto next = utf8::decode(text, pos + 1);
      const auto next_cls = classify(next.cp);
      if (next_cls != CharClass::kSpace) {
        body = pos + 1;
        cls = next_cls;
      }
    }
    if (cls != CharClass::kSpace) {
      std::size_t end = body;
      while (end < text.size()) {
        const auto d = utf8::decode(text, end);
        if (classify(d.cp) != cls) break;
        end += d.length;
      }
      out.push_back({start, end});
      pos = end;
      continue;
    }
    // Whitespace run: leave its last character for the following token when
    // one follows.
    std::size_t end = pos;
    std::size_t last_start = pos;
    while (end < text.size()) {
      const auto d = utf8::decode(text, end);
      if (!utf8::is_space(d.cp)) break;
      last_start = end;
      end += d.length;
    }
    if (end < text.size() && last_start > pos) end = last_start;
    out.push_back({pos, end});
    pos = end;
  }
  return out;
}

std::shared_ptr<const BpeModel> BpeModel::load(const std::string& vocab_path,
                                               const std::string& merges_path) {
  return from_strings(read_file(vocab_path), read_file(merges_path));
}

std::shared_ptr<const BpeModel> BpeModel::from_strings(std::string_view vocab_json,
                                                       std::string_view merges_text) {
  auto model = std::make_shared<BpeModel>();
  nlohmann::json vocab;
  try {
    vocab = nlohmann::json::parse(vocab_json);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kMalformedRecord, std::string("vocab: ") + e.what());
  }
  if (!vocab.is_object()) throw Error(Errc::kMalformedRecord, "vocab: expected a JSON object");
  for (const auto& [piece, id] : vocab.items()) {
    if (!id.is_number_integer()) throw Error(Errc::kMalformedRecord, "vocab: non-integer id for " + piece);
    model->vocab_.emplace(piece, id.get<std::int64_t>());
  }

  std::istringstream lines{std::string(merges_text)};
  std::string line;
  std::size_t rank = 0;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.rfind("#version", 0) == 0) continue;
    const auto sep = line.find(' ');
    if (sep == std::string::npos || sep == 0 || sep + 1 >= line.size()) {
      throw Error(Errc::kMalformedRecord, "merges: malformed line " + std::to_string(line_no));
    }
    model->ranks_.emplace(std::make_pair(line.substr(0, sep), line.substr(sep + 1)), rank++);
  }
  return model;
}

std::int64_t BpeModel::piece_id(std::string_view raw_bytes) const {
  const auto it = vocab_.find(byte_level_encode(raw_bytes));
  return it == vocab_.end() ? -1 : it->second;
}

std::vector<TokenSpan> BpeModel::encode_word(std::string_view word) const {
  struct Symbol {
    std::string text;
    TokenSpan span;
  };
  const auto& table = byte_alphabet();
  std::vector<Symbol> symbols;
  symbols.reserve(word.size());
  for (std::size_t i = 0; i < word.size(); ++i) {
    symbols.push_back({table[static_cast<unsigned char>(word[i])], {i, i + 1}});
  }

  while (symbols.size() > 1) {
    std::size_t best_rank = std::numeric_limits<std::size_t>::max();
    const std::pair<std::string, std::string>* best = nullptr;
    for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
      const auto it = ranks_.find({symbols[i].text, symbols[i + 1].text});
      if (it != ranks_.end() && it->second < best_rank) {
        best_rank = it->second;
        best = &it->first;
      }
    }
    if (best == nullptr) break;
    std::vector<Symbol> merged;
    merged.reserve(symbols.size());
    for (std::size_t i = 0; i < symbols.size();) {
      if (i + 1 < symbols.size() && symbols[i].text == best->first && symbols[i + 1].text == best->second) {
        merged.push_back({symbols[i].text + symbols[i + 1].text, {symbols[i].span.begin, symbols[i + 1].span.end}});
        i += 2;
      } else {
        merged.push_back(std::move(symbols[i]));
        ++i;
      }
    }
    symbols = std::move(merged);
  }

  std::vector<TokenSpan> spans;
  spans.reserve(symbols.size());
  for (const auto& s : symbols) spans.push_back(s.span);
  return spans;
}

Tokenizer Tokenizer::from_spec(const TokenizerSpec& spec) {
  if (spec.mode == TokenizerMode::kBuiltinWord) return Tokenizer{};
  if (spec.vocab_path.empty() || spec.merges_path.empty()) {
    throw Error(Errc::kInvalidArgument, "subword BPE tokenizer requires both vocab and merges files");
  }
  return bpe(BpeModel::load(spec.vocab_path, spec.merges_path));
}

Tokenizer Tokenizer::bpe(std::shared_ptr<const BpeModel> model) {
  Tokenizer t;
  t.bpe_ = std::move(model);
  return t;
}

std::vector<TokenSpan> Tokenizer::tokenize(std::string_view text) const {
  std::vector<TokenSpan> out;
  if (bpe_) {
    for (const auto& word : gpt2_pretokenize(text)) {
      for (const auto& piece : bpe_->encode_word(text.substr(word.begin, word.end - word.begin))) {
        out.push_back({word.begin + piece.begin, word.begin + piece.end});
      }
    }
    return out;
  }

  std::size_t pos = 0;
  bool in_token = false;
  bool prev_cjk = false;
  std::size_t token_start = 0;
  while (pos < text.size()) {
    const auto d = utf8::decode(text, pos);
    const bool space = utf8::is_space(d.cp);
    const bool cjk = utf8::is_cjk(d.cp);
    if (space) {
      if (in_token) out.push_back({token_start, pos});
      in_token = false;
    } else if (!in_token) {
      in_token = true;
      token_start = pos;
    } else if (cjk || (prev_cjk && (utf8::is_letter(d.cp) || utf8::is_digit(d.cp)))) {
      // Ideographs split from their neighbours; trailing punctuation stays attached.
      out.push_back({token_start, pos});
      token_start = pos;
    }
    prev_cjk = cjk;
    pos += d.length;
  }
  if (in_token) out.push_back({token_start, text.size()});
  return out;
}

std::vector<std::string> Tokenizer::pieces(std::string_view text) const {
  std::vector<std::string> out;
  for (const auto& span : tokenize(text)) out.emplace_back(text.substr(span.begin, span.end - span.begin));
  return out;
}

}  // namespace stylodet
