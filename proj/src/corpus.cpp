#include "stylodet/corpus.hpp"

#include <algorithm>
#include <exception>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>
#include <unordered_set>

#include <json.hpp>

#include "stylodet/common.hpp"
#include "stylodet/utf8.hpp"

namespace stylodet {

SourceLabel SourceLabel::machine(std::string model) {
  if (model.empty()) throw Error(Errc::kInvalidArgument, "machine source requires a model name");
  return {SourceKind::kMachine, std::move(model)};
}

SourceLabel SourceLabel::parse(std::string_view label) {
  if (label.empty()) throw Error(Errc::kInvalidArgument, "empty source label");
  if (label == "human") return human();
  return machine(std::string(label));
}

// ---- segmentation ----

namespace {

const std::set<std::string>& default_abbreviations() {
  // Words that often end a sentence ("no", "sat", "wed") are left out.
  static const std::set<std::string> kList = {
      "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "mt", "ft", "rev", "hon", "gen", "col",
      "lt", "sgt", "capt", "cmdr", "gov", "sen", "rep", "pres", "vs", "v", "e.g", "i.e", "cf", "al",
      "approx", "dept", "fig", "figs", "inc", "ltd", "co", "corp", "vol", "vols", "pp", "p", "ch",
      "eq", "eqs", "u.s", "u.k", "a.m", "p.m", "jan", "feb", "apr", "jun", "jul", "aug", "sep",
      "sept", "oct", "nov", "dec", "mon", "tue", "thu", "fri", "ave", "blvd", "rd", "ph.d", "m.d",
      "b.a", "m.a", "b.sc", "m.sc"};
  return kList;
}

bool is_terminal(char32_t cp) { return cp == U'.' || cp == U'!' || cp == U'?' || cp == U'…'; }

bool is_closer(char32_t cp) {
  return cp == U'"' || cp == U'\'' || cp == U')' || cp == U']' || cp == U'}' || cp == U'”' ||
         cp == U'’' || cp == U'»';
}

}  // namespace

SentenceSegmenter::SentenceSegmenter() : abbreviations_(default_abbreviations()) {}

SentenceSegmenter::SentenceSegmenter(std::set<std::string> abbreviations)
    : abbreviations_(std::move(abbreviations)) {}

SentenceSegmenter SentenceSegmenter::with_abbreviation_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIo, "cannot open abbreviation list " + path);
  auto list = default_abbreviations();
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    auto entry = utf8::ascii_lower(line.substr(first, last - first + 1));
    if (!entry.empty() && entry.back() == '.') entry.pop_back();
    if (!entry.empty()) list.insert(std::move(entry));
  }
  return SentenceSegmenter(std::move(list));
}

bool SentenceSegmenter::suppressed(std::string_view text, std::size_t period_pos) const {
  // The word ending at the period, back to the previous whitespace.
  std::size_t begin = period_pos;
  while (begin > 0) {
    const auto c = static_cast<unsigned char>(text[begin - 1]);
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') break;
    --begin;
  }
  std::string_view word = text.substr(begin, period_pos - begin);
  // Drop leading quotes and brackets.
  while (!word.empty() && (word.front() == '"' || word.front() == '\'' || word.front() == '(' ||
                           word.front() == '[')) {
    word.remove_prefix(1);
  }
  if (word.empty()) return false;
  if (word.size() == 1 && word[0] >= 'A' && word[0] <= 'Z') return true;  // initial
  return abbreviations_.contains(utf8::ascii_lower(word));
}

std::vector<ByteSpan> SentenceSegmenter::segment(std::string_view text) const {
  std::vector<ByteSpan> spans;
  std::optional<std::size_t> start;
  std::size_t last_content_end = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto d = utf8::decode(text, pos);
    if (utf8::is_space(d.cp)) {
      pos += d.length;
      continue;
    }
    if (!start) start = pos;
    if (!is_terminal(d.cp)) {
      pos += d.length;
      last_content_end = pos;
      continue;
    }

    const std::size_t mark_pos = pos;
    std::size_t marks = 0;
    std::size_t end = pos;
    while (end < text.size()) {
      const auto m = utf8::decode(text, end);
      if (!is_terminal(m.cp)) break;
      ++marks;
      end += m.length;
    }
    while (end < text.size()) {
      const auto c = utf8::decode(text, end);
      if (!is_closer(c.cp)) break;
      end += c.length;
    }
    last_content_end = end;
    pos = end;

    const bool followed_by_break = end == text.size() || utf8::is_space(utf8::decode(text, end).cp);
    if (!followed_by_break) continue;
    if (marks == 1 && text[mark_pos] == '.' && suppressed(text, mark_pos)) continue;
    spans.push_back({*start, end});
    start.reset();
  }
  if (start) spans.push_back({*start, last_content_end});
  return spans;
}

std::vector<ByteSpan> segment_sentences(std::string_view text) { return SentenceSegmenter{}.segment(text); }

// ---- truncation ----

Truncation truncate_to_boundary(std::string_view text, std::size_t max_tokens, const Tokenizer& tokenizer,
                                const SentenceSegmenter& segmenter) {
  if (max_tokens == 0) throw Error(Errc::kInvalidArgument, "max_tokens must be at least 1");
  const auto sentences = segmenter.segment(text);
  if (sentences.empty()) throw Error(Errc::kEmptyDocument, "empty document");

  const auto tokens = tokenizer.tokenize(text);
  auto tokens_before = [&](std::size_t byte_end) {
    return static_cast<std::size_t>(std::count_if(tokens.begin(), tokens.end(),
                                                  [&](const TokenSpan& t) { return t.end <= byte_end; }));
  };

  // Walk back from the longest candidate; the recount guards tokenizers
  // whose output on a prefix differs from the prefix of the full output.
  for (std::size_t k = sentences.size(); k-- > 0;) {
    const std::size_t end = sentences[k].end;
    if (tokens_before(end) > max_tokens) continue;
    const auto prefix = text.substr(0, end);
    const std::size_t count = tokenizer.count(prefix);
    if (count <= max_tokens && count > 0) return {std::string(prefix), count, false};
  }

  // No sentence fits: cut at the last token that keeps the prefix in budget.
  for (std::size_t n = std::min(max_tokens, tokens.size()); n > 0; --n) {
    const auto prefix = text.substr(0, tokens[n - 1].end);
    const std::size_t count = tokenizer.count(prefix);
    if (count <= max_tokens) return {std::string(prefix), count, true};
  }
  throw Error(Errc::kEmptyDocument, "empty document");
}

// ---- config ----

CorpusConfig CorpusConfig::parse(std::string_view text) {
  CorpusConfig cfg;
  std::istringstream lines{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  auto trim = [](std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return std::string{};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
  };
  while (std::getline(lines, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(Errc::kMalformedRecord, "config line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key == "max_tokens") {
      try {
        const long v = std::stol(value);
        if (v < 1) throw std::out_of_range("max_tokens");
        cfg.max_tokens = static_cast<std::size_t>(v);
      } catch (const std::exception&) {
        throw Error(Errc::kMalformedRecord, "config line " + std::to_string(line_no) + ": bad max_tokens");
      }
    } else if (key == "tokenizer") {
      if (value == "word") {
        cfg.tokenizer.mode = TokenizerMode::kBuiltinWord;
      } else if (value == "bpe") {
        cfg.tokenizer.mode = TokenizerMode::kSubwordBpe;
      } else {
        throw Error(Errc::kMalformedRecord, "config line " + std::to_string(line_no) + ": tokenizer must be word or bpe");
      }
    } else if (key == "vocab") {
      cfg.tokenizer.vocab_path = value;
    } else if (key == "merges") {
      cfg.tokenizer.merges_path = value;
    } else if (key == "abbreviations") {
      cfg.abbreviations_path = value;
    } else {
      throw Error(Errc::kMalformedRecord, "config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  return cfg;
}

CorpusConfig CorpusConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIo, "cannot open config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

// ---- ingestion ----

namespace {

std::string required_string(const nlohmann::json& rec, const char* field, const std::string& where) {
  const auto it = rec.find(field);
  if (it == rec.end() || it->is_null()) throw Error(Errc::kMalformedRecord, where + ": missing field '" + field + "'");
  if (!it->is_string()) throw Error(Errc::kMalformedRecord, where + ": field '" + field + "' must be a string");
  return it->get<std::string>();
}

}  // namespace

std::vector<Document> ingest_corpus(std::istream& in, const Tokenizer& tokenizer,
                                    const SentenceSegmenter& segmenter, const IngestOptions& options) {
  std::vector<Document> docs;
  std::vector<std::size_t> line_of;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = options.source_name + ":" + std::to_string(line_no);
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::kMalformedRecord, where + ": invalid JSON (" + e.what() + ")");
    }
    if (!rec.is_object()) throw Error(Errc::kMalformedRecord, where + ": record must be a JSON object");

    Document doc;
    doc.id = required_string(rec, "id", where);
    doc.text = required_string(rec, "text", where);
    doc.author = required_string(rec, "author", where);
    const auto label = required_string(rec, "label", where);
    doc.domain = required_string(rec, "domain", where);
    if (label.empty()) throw Error(Errc::kMalformedRecord, where + ": empty label");
    doc.source = SourceLabel::parse(label);
    if (const auto ts = rec.find("timestamp"); ts != rec.end() && !ts->is_null()) {
      if (!ts->is_number_integer()) throw Error(Errc::kMalformedRecord, where + ": timestamp must be an integer");
      doc.timestamp = ts->get<std::int64_t>();
    }
    if (!utf8::is_valid(doc.text)) throw Error(Errc::kMalformedRecord, where + ": text is not valid UTF-8");
    if (!seen.insert(doc.id).second) throw Error(Errc::kDuplicateId, where + ": duplicate id '" + doc.id + "'");
    docs.push_back(std::move(doc));
    line_of.push_back(line_no);
  }

  // Truncation is independent per document; failures are reported for the
  // earliest offending line regardless of schedule.
  const auto n = static_cast<std::ptrdiff_t>(docs.size());
  std::vector<std::exception_ptr> failures(docs.size());
#pragma omp parallel for schedule(dynamic, 16) if (options.parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      auto cut = truncate_to_boundary(docs[i].text, options.max_tokens, tokenizer, segmenter);
      docs[i].text = std::move(cut.text);
      docs[i].token_count = cut.token_count;
      docs[i].hard_cut = cut.hard_cut;
    } catch (...) {
      failures[i] = std::current_exception();
    }
  }
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (!failures[i]) continue;
    try {
      std::rethrow_exception(failures[i]);
    } catch (const Error& e) {
      throw Error(e.code(), options.source_name + ":" + std::to_string(line_of[i]) + ": " + e.what());
    }
  }
  return docs;
}

std::vector<Document> ingest_corpus_file(const std::string& path, const Tokenizer& tokenizer,
                                         const SentenceSegmenter& segmenter, IngestOptions options) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIo, "cannot open corpus " + path);
  options.source_name = path;
  return ingest_corpus(in, tokenizer, segmenter, options);
}

// ---- episodes ----

std::vector<Episode> build_episodes(const std::vector<Document>& docs, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error(Errc::kInvalidArgument, "episode size must be at least 1");
  using Key = std::tuple<std::string, std::string, SourceLabel>;  // domain, author, source
  std::map<Key, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    groups[{docs[i].domain, docs[i].author, docs[i].source}].push_back(i);
  }

  std::vector<Episode> episodes;
  for (auto& [key, members] : groups) {
    const auto& [domain, author, source] = key;
    const std::string key_text = domain + '\x1f' + author + '\x1f' + source.label();
    Rng rng(derive_seed(seed, fnv1a64(key_text)));
    rng.shuffle(members);
    for (std::size_t k = 0; k + n <= members.size(); k += n) {
      Episode ep;
      ep.id = domain + "/" + source.label() + "/" + author + "/" + std::to_string(k / n);
      ep.author = author;
      ep.source = source;
      ep.domain = domain;
      ep.documents.reserve(n);
      for (std::size_t j = k; j < k + n; ++j) ep.documents.push_back(docs[members[j]]);
      episodes.push_back(std::move(ep));
    }
  }
  return episodes;
}

std::vector<Document> balance_corpus(const std::vector<Document>& docs, std::uint64_t seed) {
  std::vector<std::size_t> human;
  std::vector<std::size_t> machine;
  for (std::size_t i = 0; i < docs.size(); ++i) (docs[i].source.is_machine() ? machine : human).push_back(i);
  if (human.empty() || machine.empty()) {
    throw Error(Errc::kSingleClass, "balancing requires both human and machine documents");
  }
  auto& majority = human.size() > machine.size() ? human : machine;
  const auto& minority = human.size() > machine.size() ? machine : human;

  Rng rng(seed);
  std::vector<std::size_t> keep;
  for (auto pick : rng.sample_without_replacement(majority.size(), minority.size())) keep.push_back(majority[pick]);
  keep.insert(keep.end(), minority.begin(), minority.end());
  std::sort(keep.begin(), keep.end());

  std::vector<Document> out;
  out.reserve(keep.size());
  for (auto i : keep) out.push_back(docs[i]);
  return out;
}

}  // namespace stylodet
