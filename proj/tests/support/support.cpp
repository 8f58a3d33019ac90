#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <cctype>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "stylodet/common.hpp"
#include "stylodet/embedder.hpp"
#include "stylodet/embedding.hpp"

#ifndef STYLODET_TEST_DATA
#define STYLODET_TEST_DATA "tests/data"
#endif

namespace testsupport {

using stylodet::Document;
using stylodet::Rng;

namespace {

class Categorical {
 public:
  explicit Categorical(const std::vector<double>& weights) : cumulative_(weights.size()) {
    double total = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      total += weights[i];
      cumulative_[i] = total;
    }
    for (double& c : cumulative_) c /= total;
  }

  std::size_t draw(Rng& rng) const {
    const double u = rng.uniform01();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return std::min(static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1);
  }

 private:
  std::vector<double> cumulative_;
};

std::vector<std::string> make_content_words(std::size_t count, Rng& rng) {
  static const char* onsets[] = {"b", "br", "c", "ch", "d", "f", "g", "gr", "h", "k", "l", "m",
                                 "n", "p", "pl", "r", "s", "sh", "st", "t", "tr", "v", "w", "z"};
  static const char* vowels[] = {"a", "e", "i", "o", "u", "ai", "ea", "ou", "y"};
  static const char* codas[] = {"", "n", "r", "s", "t", "l", "nd", "ck", "m", "x"};
  std::vector<std::string> words;
  std::set<std::string> seen;
  while (words.size() < count) {
    std::string w;
    const auto syllables = 1 + rng.uniform_below(3);
    for (std::uint64_t s = 0; s < syllables; ++s) {
      w += onsets[rng.uniform_below(std::size(onsets))];
      w += vowels[rng.uniform_below(std::size(vowels))];
      w += codas[rng.uniform_below(std::size(codas))];
    }
    if (seen.insert(w).second) words.push_back(w);
  }
  return words;
}

struct AuthorStyle {
  Categorical function_words;
  Categorical content_words;
  double function_share;
  double sentence_length;
  double comma_rate;
  Categorical end_marks;  // . ! ? ...
  double capital_rate;    // chance a content word is capitalized
};

std::vector<double> perturbed_zipf(std::size_t n, double spread, Rng& rng) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = std::exp(spread * rng.normal()) / static_cast<double>(i + 1);
  return w;
}

AuthorStyle make_style(std::size_t n_function, std::size_t n_content, double spread, Rng& rng) {
  const double a = rng.uniform01();
  const double b = rng.uniform01() * 0.4;
  const double c = rng.uniform01() * 0.3;
  return AuthorStyle{
      Categorical(perturbed_zipf(n_function, spread, rng)),
      Categorical(perturbed_zipf(n_content, spread, rng)),
      0.3 + 0.35 * rng.uniform01(),
      6.0 + 14.0 * rng.uniform01(),
      0.15 * rng.uniform01(),
      Categorical({1.0 + a, b, c, 0.1 * rng.uniform01()}),
      0.1 * rng.uniform01(),
  };
}

std::string write_document(const AuthorStyle& style, const std::vector<std::string>& function_words,
                           const std::vector<std::string>& content_words, Rng& rng) {
  static const char* marks[] = {".", "!", "?", "..."};
  std::string text;
  const auto sentences = 3 + rng.uniform_below(3);
  for (std::uint64_t s = 0; s < sentences; ++s) {
    const double jitter = 0.6 + 0.8 * rng.uniform01();
    const auto length = std::max<std::size_t>(2, static_cast<std::size_t>(style.sentence_length * jitter));
    for (std::size_t i = 0; i < length; ++i) {
      std::string word;
      if (rng.uniform01() < style.function_share) {
        word = function_words[style.function_words.draw(rng)];
      } else {
        word = content_words[style.content_words.draw(rng)];
        if (rng.uniform01() < style.capital_rate) word[0] = static_cast<char>(std::toupper(word[0]));
      }
      if (i == 0) word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
      if (!text.empty()) text += ' ';
      text += word;
      if (i + 1 < length && rng.uniform01() < style.comma_rate) text += ',';
    }
    text += marks[style.end_marks.draw(rng)];
  }
  return text;
}

}  // namespace

std::vector<Document> synthetic_corpus(const SyntheticOptions& options) {
  Rng vocab_rng(stylodet::derive_seed(options.seed, 0xC0FFEE));
  std::vector<std::string> function_words;
  for (const auto& w : stylodet::default_function_words()) {
    if (w.find_first_of("'- ") == std::string::npos) function_words.push_back(w);
    if (function_words.size() == 120) break;
  }
  const auto content_words = make_content_words(400, vocab_rng);

  const std::size_t authors = options.machine_authors + options.human_authors;
  std::vector<AuthorStyle> styles;
  for (std::size_t a = 0; a < authors; ++a) {
    Rng rng(stylodet::derive_seed(options.seed, 1, a));
    styles.push_back(make_style(function_words.size(), content_words.size(), options.style_spread, rng));
  }

  const stylodet::Tokenizer tokenizer;
  std::vector<Document> docs;
  for (std::size_t d = 0; d < options.domains.size(); ++d) {
    for (std::size_t a = 0; a < authors; ++a) {
      const bool machine = a < options.machine_authors;
      const std::string author =
          machine ? "model-" + std::to_string(a) : "human-" + std::to_string(a - options.machine_authors);
      Rng rng(stylodet::derive_seed(options.seed, 2 + d, a));
      for (std::size_t k = 0; k < options.docs_per_author; ++k) {
        Document doc;
        doc.id = options.domains[d] + "/" + author + "/" + std::to_string(k);
        const auto raw = write_document(styles[a], function_words, content_words, rng);
        const auto cut = stylodet::truncate_to_boundary(raw, 128, tokenizer);
        doc.text = cut.text;
        doc.token_count = cut.token_count;
        doc.hard_cut = cut.hard_cut;
        doc.author = author;
        doc.source = machine ? stylodet::SourceLabel::machine(author) : stylodet::SourceLabel::human();
        doc.domain = options.domains[d];
        docs.push_back(std::move(doc));
      }
    }
  }
  return docs;
}

OracleMetrics oracle_metrics(const std::vector<double>& scores, const std::vector<int>& labels, double max_fpr) {
  std::vector<double> thresholds = scores;
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  double n_pos = 0, n_neg = 0;
  for (int l : labels) (l == 1 ? n_pos : n_neg) += 1;

  std::vector<double> xs = {0.0}, ys = {0.0};
  for (double t : thresholds) {
    double tp = 0, fp = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (scores[i] >= t) (labels[i] == 1 ? tp : fp) += 1;
    }
    xs.push_back(fp / n_neg);
    ys.push_back(tp / n_pos);
  }

  OracleMetrics out;
  double raw = 0.0;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double x0 = xs[i - 1], x1 = xs[i], y0 = ys[i - 1], y1 = ys[i];
    out.auc_trapezoid += (x1 - x0) * (y0 + y1) / 2.0;
    if (x0 >= max_fpr) continue;
    if (x1 <= max_fpr) {
      raw += (x1 - x0) * (y0 + y1) / 2.0;
    } else {
      const double y_cut = y0 + (y1 - y0) * (max_fpr - x0) / (x1 - x0);
      raw += (max_fpr - x0) * (y0 + y_cut) / 2.0;
    }
  }
  const double lo = max_fpr * max_fpr / 2.0;
  out.pauc = 0.5 * (1.0 + (raw - lo) / (max_fpr - lo));

  double wins = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] == 1) continue;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  out.auc_pairs = wins / (n_pos * n_neg);

  out.fpr95 = 1.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (ys[i] < 0.95) continue;
    if (i == 0 || ys[i - 1] >= 0.95 || xs[i] == xs[i - 1]) {
      out.fpr95 = xs[i];
    } else {
      out.fpr95 = xs[i - 1] + (0.95 - ys[i - 1]) * (xs[i] - xs[i - 1]) / (ys[i] - ys[i - 1]);
    }
    break;
  }
  return out;
}

FixedDistribution::FixedDistribution(std::vector<std::string> vocab, std::vector<double> probs)
    : vocab_(std::move(vocab)), probs_(std::move(probs)) {}

std::vector<stylodet::TokenStat> FixedDistribution::token_stats(const Document& doc) const {
  double entropy = 0.0;
  for (double p : probs_) {
    if (p > 0) entropy -= p * std::log(p);
  }
  std::vector<stylodet::TokenStat> out;
  std::istringstream words(doc.text);
  std::string w;
  while (words >> w) {
    const auto it = std::find(vocab_.begin(), vocab_.end(), w);
    if (it == vocab_.end()) throw std::runtime_error("token outside toy vocabulary: " + w);
    const auto id = static_cast<std::size_t>(it - vocab_.begin());
    std::size_t rank = 1;
    for (std::size_t j = 0; j < probs_.size(); ++j) {
      if (probs_[j] > probs_[id] || (probs_[j] == probs_[id] && j < id)) ++rank;
    }
    out.push_back({probs_[id], rank, entropy});
  }
  return out;
}

std::vector<stylodet::ScoreRecord> noisy_scores(std::uint64_t seed, std::size_t n_pos, std::size_t n_neg) {
  Rng rng(seed);
  std::vector<stylodet::ScoreRecord> out;
  for (std::size_t i = 0; i < n_pos; ++i) out.push_back({"p" + std::to_string(i), 1.2 + 0.4 * rng.normal(), 1, "s"});
  for (std::size_t i = 0; i < n_neg; ++i) out.push_back({"n" + std::to_string(i), rng.uniform01(), 0, "s"});
  return out;
}

stylodet::EmbeddedEpisode make_episode(const std::string& id, const std::string& label, const std::string& domain,
                                       std::vector<float> v) {
  stylodet::EmbeddedEpisode ep;
  ep.id = id;
  ep.source = stylodet::SourceLabel::parse(label);
  ep.author = ep.source.is_machine() ? label : id;
  ep.domain = domain;
  ep.pooled = stylodet::normalized(std::move(v));
  return ep;
}

std::string data_path(const std::string& name) { return std::string(STYLODET_TEST_DATA) + "/" + name; }

std::vector<GoldenCase> load_truncation_golden() {
  std::ifstream in(data_path("truncation_golden.txt"));
  if (!in) throw std::runtime_error("cannot open truncation fixture");
  std::vector<GoldenCase> cases;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    GoldenCase c;
    c.limit = std::stoul(line.substr(0, tab));
    for (std::size_t i = tab + 1; i < line.size(); ++i) {
      const char ch = line[i];
      if (ch == '|') {
        c.boundaries.push_back(c.text.size());
      } else if (ch == '\\' && i + 1 < line.size() && (line[i + 1] == 'n' || line[i + 1] == 't')) {
        c.text += line[i + 1] == 'n' ? '\n' : '\t';
        ++i;
      } else {
        c.text += ch;
      }
    }
    cases.push_back(std::move(c));
  }
  return cases;
}

namespace {

std::size_t whitespace_tokens(std::string_view s) {
  std::size_t n = 0;
  bool in_word = false;
  for (char ch : s) {
    const bool space = ch == ' ' || ch == '\n' || ch == '\t' || ch == '\r';
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

}  // namespace

stylodet::Truncation oracle_truncation(const GoldenCase& c, std::size_t limit) {
  stylodet::Truncation best;
  for (std::size_t b : c.boundaries) {
    const auto prefix = std::string_view(c.text).substr(0, b);
    const auto n = whitespace_tokens(prefix);
    if (n > limit) break;
    best = {std::string(prefix), n, false};
  }
  if (!best.text.empty()) return best;

  // First sentence too long: keep the first `limit` words.
  std::size_t n = 0, end = 0;
  bool in_word = false;
  for (std::size_t i = 0; i < c.text.size(); ++i) {
    const char ch = c.text[i];
    const bool space = ch == ' ' || ch == '\n' || ch == '\t' || ch == '\r';
    if (!space && !in_word) {
      if (n == limit) break;
      ++n;
    }
    if (!space) end = i + 1;
    in_word = !space;
  }
  return {c.text.substr(0, end), n, true};
}

}  // namespace testsupport
