#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <unordered_map>

#include <CLI11.hpp>
#include <json.hpp>

#include "stylodet/common.hpp"
#include "stylodet/corpus.hpp"
#include "stylodet/embedder.hpp"
#include "stylodet/kernels.hpp"
#include "stylodet/manifest.hpp"
#include "stylodet/protocols.hpp"
#include "stylodet/report.hpp"
#include "stylodet/scoring.hpp"
#include "stylodet/store.hpp"
#include "stylodet/trainer.hpp"
#include "stylodet/zeroshot.hpp"

namespace stylodet::cli {

namespace {

using json = nlohmann::ordered_json;

struct CorpusOpts {
  std::size_t max_tokens = 128;
  std::string tokenizer = "word";
  std::string vocab;
  std::string merges;
  std::string abbreviations;

  json to_json() const {
    return {{"max_tokens", max_tokens}, {"tokenizer", tokenizer}, {"vocab", vocab}, {"merges", merges},
            {"abbreviations", abbreviations}};
  }
  static CorpusOpts from_json(const nlohmann::json& j) {
    CorpusOpts c;
    c.max_tokens = j.value("max_tokens", c.max_tokens);
    c.tokenizer = j.value("tokenizer", c.tokenizer);
    c.vocab = j.value("vocab", c.vocab);
    c.merges = j.value("merges", c.merges);
    c.abbreviations = j.value("abbreviations", c.abbreviations);
    return c;
  }

  void apply_config_file(const std::string& path) {
    const auto cfg = CorpusConfig::load(path);
    max_tokens = cfg.max_tokens;
    tokenizer = cfg.tokenizer.mode == TokenizerMode::kSubwordBpe ? "bpe" : "word";
    if (!cfg.tokenizer.vocab_path.empty()) vocab = cfg.tokenizer.vocab_path;
    if (!cfg.tokenizer.merges_path.empty()) merges = cfg.tokenizer.merges_path;
    if (!cfg.abbreviations_path.empty()) abbreviations = cfg.abbreviations_path;
  }

  Tokenizer make_tokenizer() const {
    TokenizerSpec spec;
    if (tokenizer == "bpe") {
      spec.mode = TokenizerMode::kSubwordBpe;
    } else if (tokenizer != "word") {
      throw Error(Errc::kInvalidArgument, "tokenizer must be word or bpe");
    }
    spec.vocab_path = vocab;
    spec.merges_path = merges;
    return Tokenizer::from_spec(spec);
  }

  SentenceSegmenter make_segmenter() const {
    return abbreviations.empty() ? SentenceSegmenter{} : SentenceSegmenter::with_abbreviation_file(abbreviations);
  }
};

struct EmbedOpts {
  std::string import;
  std::uint32_t expected_dim = 0;
  std::string projection;
  std::size_t buckets = 8192;

  json to_json() const {
    return {{"import", import}, {"expected_dim", expected_dim}, {"projection", projection}, {"buckets", buckets}};
  }
  static EmbedOpts from_json(const nlohmann::json& j) {
    EmbedOpts e;
    e.import = j.value("import", e.import);
    e.expected_dim = j.value("expected_dim", e.expected_dim);
    e.projection = j.value("projection", e.projection);
    e.buckets = j.value("buckets", e.buckets);
    return e;
  }

  std::shared_ptr<const DocumentEmbedder> make(bool with_projection = true) const {
    std::shared_ptr<const DocumentEmbedder> base;
    if (!import.empty()) {
      std::optional<std::uint32_t> dim;
      if (expected_dim != 0) dim = expected_dim;
      const auto records = import_external(import, dim);
      if (records.empty()) throw Error(Errc::kInsufficientData, "imported store " + import + " is empty");
      std::unordered_map<std::string, EmbeddingVector> by_id;
      for (const auto& r : records) by_id.emplace(r.id, r.vector);
      base = std::make_shared<StoreEmbedder>(records.front().vector.dim(), std::move(by_id));
    } else {
      FeaturizerConfig cfg;
      cfg.buckets = buckets;
      base = std::make_shared<StylometricFeaturizer>(cfg);
    }
    if (with_projection && !projection.empty()) {
      auto head = std::make_shared<const ProjectionHead>(read_projection(projection));
      base = std::make_shared<ProjectedEmbedder>(base, head);
    }
    return base;
  }
};

void add_corpus_options(CLI::App* cmd, CorpusOpts& c) {
  cmd->add_option("--max-tokens", c.max_tokens, "Token limit per document")->check(CLI::PositiveNumber);
  cmd->add_option("--tokenizer", c.tokenizer, "word or bpe")->check(CLI::IsMember({"word", "bpe"}));
  cmd->add_option("--vocab", c.vocab, "BPE vocab.json");
  cmd->add_option("--merges", c.merges, "BPE merges.txt");
  cmd->add_option("--abbreviations", c.abbreviations, "Extra abbreviation list");
}

void add_embed_options(CLI::App* cmd, EmbedOpts& e) {
  cmd->add_option("--import", e.import, "Per-document embedding store from an external encoder");
  cmd->add_option("--expected-dim", e.expected_dim, "Required dim of the imported store");
  cmd->add_option("--projection", e.projection, "Projection head file");
  cmd->add_option("--buckets", e.buckets, "Hashed n-gram buckets of the built-in featurizer");
}

template <typename F>
void write_output(const std::string& path, std::ostream& fallback, F&& body) {
  if (path.empty() || path == "-") {
    body(fallback);
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(Errc::kIo, "cannot write " + path);
  body(f);
  if (!f) throw Error(Errc::kIo, "error writing " + path);
}

// Documents for detect: "id" and "text" required, the rest optional.
std::vector<Document> read_loose_documents(const std::string& path, const CorpusOpts& corpus) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIo, "cannot open " + path);
  const auto tokenizer = corpus.make_tokenizer();
  const auto segmenter = corpus.make_segmenter();
  std::vector<Document> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = path + ":" + std::to_string(line_no);
    try {
      const auto j = nlohmann::json::parse(line);
      Document d;
      d.id = j.at("id").get<std::string>();
      d.text = j.at("text").get<std::string>();
      d.author = j.value("author", std::string());
      d.domain = j.value("domain", std::string());
      if (j.contains("label")) d.source = SourceLabel::parse(j.at("label").get<std::string>());
      auto cut = truncate_to_boundary(d.text, corpus.max_tokens, tokenizer, segmenter);
      d.text = std::move(cut.text);
      d.token_count = cut.token_count;
      d.hard_cut = cut.hard_cut;
      docs.push_back(std::move(d));
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::kMalformedRecord, where + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.code(), where + ": " + e.what());
    }
  }
  return docs;
}

// Minimal RFC 4180 reader for the score dump.
std::vector<std::vector<std::string>> read_csv(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else if (c != '\r') {
      field += c;
    }
  }
  if (any) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ScoreRecord> read_scores_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIo, "cannot open " + path);
  const auto rows = read_csv(in);
  if (rows.empty()) throw Error(Errc::kMalformedRecord, path + ": empty score file");
  const auto& header = rows.front();
  auto col = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw Error(Errc::kMalformedRecord, path + ": missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto qi = col("query_id");
  const auto si = col("score");
  const auto li = col("label");
  const auto pi = col("support_id");
  std::vector<ScoreRecord> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != header.size()) {
      throw Error(Errc::kMalformedRecord, path + ": row " + std::to_string(r + 1) + " has the wrong field count");
    }
    ScoreRecord rec;
    rec.query_id = row[qi];
    rec.support_id = row[pi];
    try {
      std::size_t used = 0;
      rec.score = std::stod(row[si], &used);
      if (used != row[si].size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw Error(Errc::kMalformedRecord, path + ": row " + std::to_string(r + 1) + ": bad score '" + row[si] + "'");
    }
    if (row[li] != "0" && row[li] != "1") {
      throw Error(Errc::kMalformedRecord, path + ": row " + std::to_string(r + 1) + ": label must be 0 or 1");
    }
    rec.label = row[li] == "1" ? 1 : 0;
    out.push_back(std::move(rec));
  }
  return out;
}

// ---- eval ----

struct EvalRun {
  std::string protocol = "single";
  std::string episodes;
  std::string store;
  std::string paraphrases;
  std::vector<std::size_t> sweep_n;
  std::string sweep_protocol = "single";
  std::string format = "json";
  std::string scores;
  EvalConfig eval;
  CorpusOpts corpus;
  EmbedOpts embed;

  json to_json() const {
    json j;
    j["command"] = "eval";
    j["protocol"] = protocol;
    j["episodes"] = episodes;
    j["store"] = store;
    j["paraphrases"] = paraphrases;
    j["sweep_n"] = sweep_n;
    j["sweep_protocol"] = sweep_protocol;
    j["format"] = format;
    j["eval"] = eval.to_json();
    j["corpus"] = corpus.to_json();
    j["embedder"] = embed.to_json();
    return j;
  }

  static EvalRun from_json(const nlohmann::json& j) {
    EvalRun r;
    try {
      r.protocol = j.at("protocol").get<std::string>();
      r.episodes = j.value("episodes", std::string());
      r.store = j.value("store", std::string());
      r.paraphrases = j.value("paraphrases", std::string());
      r.sweep_n = j.value("sweep_n", std::vector<std::size_t>{});
      r.sweep_protocol = j.value("sweep_protocol", r.sweep_protocol);
      r.format = j.value("format", r.format);
      r.eval = EvalConfig::from_json(j.at("eval"));
      if (j.contains("corpus")) r.corpus = CorpusOpts::from_json(j.at("corpus"));
      if (j.contains("embedder")) r.embed = EmbedOpts::from_json(j.at("embedder"));
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::kMalformedRecord, std::string("bad run config: ") + e.what());
    }
    return r;
  }
};

EvalRun load_replay(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIo, "cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kMalformedRecord, path + ": " + e.what());
  }
  if (!j.contains("config")) throw Error(Errc::kMalformedRecord, path + ": report has no config");
  return EvalRun::from_json(j.at("config"));
}

void emit_report(std::ostream& out, const EvalReport& report, const std::string& format) {
  if (format == "csv") {
    write_report_csv(out, report);
  } else {
    out << report_json(report).dump(2) << '\n';
  }
}

void run_eval(const EvalRun& run, const std::string& output, std::ostream& out) {
  run.eval.validate();
  if (run.format != "json" && run.format != "csv") throw Error(Errc::kInvalidArgument, "format must be json or csv");
  const bool have_episodes = !run.episodes.empty();
  if (have_episodes == !run.store.empty()) {
    throw Error(Errc::kInvalidArgument, "give exactly one of --episodes or --store");
  }
  auto cfg = run.eval;
  if (!run.scores.empty()) cfg.keep_records = true;

  std::vector<Episode> raw;
  std::vector<EmbeddedEpisode> embedded;
  std::shared_ptr<const DocumentEmbedder> embedder;
  if (have_episodes) {
    raw = read_manifest_file(run.episodes);
    embedder = run.embed.make();
    if (run.protocol != "sweep") embedded = embed_episodes(raw, *embedder, {}, cfg.parallel);
  } else {
    if (run.protocol == "sweep") throw Error(Errc::kInvalidArgument, "sweep needs --episodes");
    const auto store = read_store(run.store);
    embedded = episodes_from_records(store.records);
    for (const auto& r : store.records) raw.push_back({r.id, {}, r.author, r.source, r.domain});
  }
  const auto run_json = run.to_json();

  std::vector<ScoreRecord> all_records;
  auto collect = [&](const EvalReport& r) { all_records.insert(all_records.end(), r.records.begin(), r.records.end()); };

  if (run.protocol == "single" || run.protocol == "multi" || run.protocol == "unknown") {
    auto report = run_protocol(parse_protocol(run.protocol), embedded, cfg);
    report.config = run_json;
    collect(report);
    write_output(output, out, [&](std::ostream& o) { emit_report(o, report, run.format); });
  } else if (run.protocol == "paraphrase") {
    if (run.paraphrases.empty()) throw Error(Errc::kInvalidArgument, "paraphrase protocol needs --paraphrases");
    std::ifstream in(run.paraphrases);
    if (!in) throw Error(Errc::kIo, "cannot open " + run.paraphrases);
    const auto para = read_paraphrases(in, raw, run.corpus.make_tokenizer(), run.corpus.make_segmenter(),
                                       run.corpus.max_tokens, run.paraphrases);
    if (!embedder) embedder = run.embed.make();
    std::vector<Episode> para_eps;
    for (const auto& [id, ep] : para) para_eps.push_back(ep);
    const auto para_emb = embed_episodes(para_eps, *embedder, {}, cfg.parallel);
    ParaphraseMap map;
    for (const auto& e : para_emb) map.emplace(e.id, e);
    const auto points = paraphrase_eval(embedded, map, cfg);
    write_output(output, out, [&](std::ostream& o) {
      if (run.format == "csv") {
        for (const auto& p : points) {
          o << "# proportion " << p.proportion << " undefended\n";
          write_report_csv(o, p.undefended);
          if (p.defended) {
            o << "# proportion " << p.proportion << " defended\n";
            write_report_csv(o, *p.defended);
          }
        }
        return;
      }
      json j;
      j["protocol"] = "paraphrase";
      j["config"] = run_json;
      auto arr = json::array();
      for (const auto& p : points) {
        json pj;
        pj["proportion"] = p.proportion;
        pj["undefended"] = report_json(p.undefended);
        pj["defended"] = p.defended ? report_json(*p.defended) : json(nullptr);
        arr.push_back(std::move(pj));
      }
      j["points"] = std::move(arr);
      o << j.dump(2) << '\n';
    });
    for (const auto& p : points) {
      collect(p.undefended);
      if (p.defended) collect(*p.defended);
    }
  } else if (run.protocol == "sweep") {
    if (run.sweep_n.empty()) throw Error(Errc::kInvalidArgument, "sweep needs --sweep-n");
    std::vector<Document> docs;
    for (const auto& ep : raw) docs.insert(docs.end(), ep.documents.begin(), ep.documents.end());
    const auto results = sweep_n(docs, *embedder, cfg, run.sweep_n, parse_protocol(run.sweep_protocol));
    write_output(output, out, [&](std::ostream& o) {
      if (run.format == "csv") {
        for (const auto& [n, r] : results) {
          o << "# N " << n << '\n';
          write_report_csv(o, r);
        }
        return;
      }
      json j;
      j["protocol"] = "sweep";
      j["config"] = run_json;
      auto arr = json::array();
      for (const auto& [n, r] : results) arr.push_back(json{{"n", n}, {"report", report_json(r)}});
      j["reports"] = std::move(arr);
      o << j.dump(2) << '\n';
    });
    for (const auto& [n, r] : results) collect(r);
  } else {
    throw Error(Errc::kInvalidArgument, "unknown protocol '" + run.protocol + "'");
  }

  if (!run.scores.empty()) {
    write_output(run.scores, out, [&](std::ostream& o) { write_scores_csv(o, all_records); });
  }
}

BatchComposition parse_composition(const std::string& s) {
  if (s == "none") return BatchComposition::kNone;
  if (s == "half") return BatchComposition::kHalfHumanHalfMachine;
  if (s == "domains") return BatchComposition::kAllDomainsPresent;
  throw Error(Errc::kInvalidArgument, "composition must be none, half or domains");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Few-shot machine-text detection with style embeddings", "stylodet"};
  app.require_subcommand(1);

  // prepare
  struct {
    std::string input, output, config;
    std::size_t episode_size = 5;
    std::uint64_t seed = 0;
    bool balance = false;
    CorpusOpts corpus;
  } prep;
  auto* prepare = app.add_subcommand("prepare", "Ingest, truncate and group a corpus into episodes");
  prepare->add_option("--input", prep.input, "Corpus JSONL")->required();
  prepare->add_option("--output", prep.output, "Episode manifest (default stdout)");
  prepare->add_option("--config", prep.config, "key = value corpus config; overrides flags");
  prepare->add_option("--episode-size,-N", prep.episode_size, "Documents per episode")->check(CLI::PositiveNumber);
  prepare->add_option("--seed", prep.seed, "Seed");
  prepare->add_flag("--balance", prep.balance, "Down-sample the majority class first");
  add_corpus_options(prepare, prep.corpus);

  // embed
  struct {
    std::string episodes, output;
    EmbedOpts embed;
  } emb;
  auto* embed = app.add_subcommand("embed", "Embed episodes into a store");
  embed->add_option("--episodes", emb.episodes, "Episode manifest")->required();
  embed->add_option("--output", emb.output, "Output store")->required();
  add_embed_options(embed, emb.embed);

  // eval
  EvalRun ev;
  std::string eval_output, replay, aggregation = "min", scorer = "cosine";
  bool no_defense = false;
  auto* eval = app.add_subcommand("eval", "Run an evaluation protocol");
  eval->add_option("--protocol", ev.protocol, "single|multi|unknown|paraphrase|sweep")
      ->check(CLI::IsMember({"single", "multi", "unknown", "paraphrase", "sweep"}));
  eval->add_option("--episodes", ev.episodes, "Episode manifest");
  eval->add_option("--store", ev.store, "Episode embedding store");
  eval->add_option("--paraphrases", ev.paraphrases, "Paraphrase JSONL");
  eval->add_option("--sweep-n", ev.sweep_n, "Episode sizes for the sweep")->delimiter(',');
  eval->add_option("--sweep-protocol", ev.sweep_protocol, "Protocol run at each N")
      ->check(CLI::IsMember({"single", "multi", "unknown"}));
  eval->add_option("--format", ev.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  eval->add_option("--scores", ev.scores, "Also dump every score record to this CSV");
  eval->add_option("--output", eval_output, "Report path (default stdout)");
  eval->add_option("--replay", replay, "Re-run the configuration embedded in a report");
  eval->add_option("--seed", ev.eval.seed, "Seed");
  eval->add_option("--episode-size", ev.eval.episode_size, "N for the unknown-LLM support")->check(CLI::PositiveNumber);
  eval->add_option("--max-fpr", ev.eval.max_fpr, "pAUC false-positive limit");
  eval->add_option("--trials", ev.eval.trials, "Trials (multi, unknown)")->check(CLI::PositiveNumber);
  eval->add_option("--bootstrap", ev.eval.bootstrap, "Bootstrap resamples");
  eval->add_option("--aggregation", aggregation, "min or max")->check(CLI::IsMember({"min", "max"}));
  eval->add_option("--scorer", scorer, "cosine or prototype")->check(CLI::IsMember({"cosine", "prototype"}));
  eval->add_option("--proportions", ev.eval.paraphrase_proportions, "Paraphrased query proportions")->delimiter(',');
  eval->add_flag("--no-defense", no_defense, "Skip the defended paraphrase mode");
  add_corpus_options(eval, ev.corpus);
  add_embed_options(eval, ev.embed);

  // detect
  struct {
    std::string support, queries, calibrator, output;
    CorpusOpts corpus;
    EmbedOpts embed;
  } det;
  auto* detect = app.add_subcommand("detect", "Score query documents against a support sample");
  detect->add_option("--support", det.support, "Support documents JSONL")->required();
  detect->add_option("--queries", det.queries, "Query documents JSONL")->required();
  detect->add_option("--calibrator", det.calibrator, "Platt head file");
  detect->add_option("--output", det.output, "CSV output (default stdout)");
  add_corpus_options(detect, det.corpus);
  add_embed_options(detect, det.embed);

  // train-projection
  struct {
    std::string episodes, output, log, composition = "none";
    ContrastiveConfig cfg;
    EmbedOpts embed;
  } tp;
  auto* train_proj = app.add_subcommand("train-projection", "Fit a projection head with the contrastive objective");
  train_proj->add_option("--episodes", tp.episodes, "Episode manifest")->required();
  train_proj->add_option("--output", tp.output, "Head file")->required();
  train_proj->add_option("--log", tp.log, "Training log JSONL");
  train_proj->add_option("--steps", tp.cfg.steps, "SGD steps");
  train_proj->add_option("--learning-rate", tp.cfg.learning_rate, "Step size");
  train_proj->add_option("--temperature", tp.cfg.temperature, "Softmax temperature");
  train_proj->add_option("--batch-pairs", tp.cfg.batch_pairs, "Pairs per batch");
  train_proj->add_option("--output-dim", tp.cfg.output_dim, "Projected dim");
  train_proj->add_option("--composition", tp.composition, "none|half|domains")
      ->check(CLI::IsMember({"none", "half", "domains"}));
  train_proj->add_option("--seed", tp.cfg.seed, "Seed");
  add_embed_options(train_proj, tp.embed);

  // calibrate
  struct {
    std::string scores, output;
  } cal;
  auto* calibrate = app.add_subcommand("calibrate", "Fit Platt scaling to a score dump");
  calibrate->add_option("--scores", cal.scores, "CSV with query_id,support_id,score,label")->required();
  calibrate->add_option("--output", cal.output, "Calibrator file")->required();

  // train-head
  struct {
    std::string store, output;
    LogisticOptions opts;
  } th;
  auto* train_head = app.add_subcommand("train-head", "Fit a logistic head on frozen embeddings");
  train_head->add_option("--store", th.store, "Embedding store; machine records are the positive class")->required();
  train_head->add_option("--output", th.output, "Head file")->required();
  train_head->add_option("--l2", th.opts.l2_penalty, "L2 penalty");
  train_head->add_option("--max-iterations", th.opts.max_iterations, "Gradient steps");
  train_head->add_option("--seed", th.opts.seed, "Seed");

  // zeroshot
  struct {
    std::string episodes, lm_corpus, stats, detector = "rank", output, format = "json";
    NGramOptions lm;
    EvalConfig eval;
    CorpusOpts corpus;
  } zs;
  auto* zeroshot = app.add_subcommand("zeroshot", "Evaluate a likelihood-based zero-shot detector");
  zeroshot->add_option("--episodes", zs.episodes, "Episode manifest")->required();
  zeroshot->add_option("--lm-corpus", zs.lm_corpus, "Corpus JSONL to train the n-gram LM on");
  zeroshot->add_option("--stats", zs.stats, "Precomputed token statistics JSONL");
  zeroshot->add_option("--detector", zs.detector, "rank|logrank|entropy")
      ->check(CLI::IsMember({"rank", "logrank", "entropy"}));
  zeroshot->add_option("--order", zs.lm.order, "n-gram order")->check(CLI::PositiveNumber);
  zeroshot->add_option("--alpha", zs.lm.alpha, "Additive smoothing");
  zeroshot->add_option("--seed", zs.eval.seed, "Seed");
  zeroshot->add_option("--max-fpr", zs.eval.max_fpr, "pAUC false-positive limit");
  zeroshot->add_option("--bootstrap", zs.eval.bootstrap, "Bootstrap resamples");
  zeroshot->add_option("--format", zs.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  zeroshot->add_option("--output", zs.output, "Report path (default stdout)");
  add_corpus_options(zeroshot, zs.corpus);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*prepare) {
      if (!prep.config.empty()) prep.corpus.apply_config_file(prep.config);
      IngestOptions opts;
      opts.max_tokens = prep.corpus.max_tokens;
      auto docs = ingest_corpus_file(prep.input, prep.corpus.make_tokenizer(), prep.corpus.make_segmenter(), opts);
      if (prep.balance) docs = balance_corpus(docs, prep.seed);
      const auto episodes = build_episodes(docs, prep.episode_size, prep.seed);
      write_output(prep.output, out, [&](std::ostream& o) { write_manifest(o, episodes); });
      if (!prep.output.empty() && prep.output != "-") {
        out << "episodes " << episodes.size() << " from " << docs.size() << " documents\n";
      }
    } else if (*embed) {
      const auto episodes = read_manifest_file(emb.episodes);
      const auto embedder = emb.embed.make();
      const auto embedded = embed_episodes(episodes, *embedder);
      write_store(emb.output, episode_records(embedded), static_cast<std::uint32_t>(embedder->dim()));
      out << "records " << embedded.size() << " dim " << embedder->dim() << '\n';
    } else if (*eval) {
      if (!replay.empty()) {
        run_eval(load_replay(replay), eval_output, out);
      } else {
        ev.eval.aggregation = parse_aggregation(aggregation);
        ev.eval.scorer = parse_scorer(scorer);
        ev.eval.paraphrase_defended = !no_defense;
        run_eval(ev, eval_output, out);
      }
    } else if (*detect) {
      const auto support_docs = read_loose_documents(det.support, det.corpus);
      const auto query_docs = read_loose_documents(det.queries, det.corpus);
      if (support_docs.empty()) throw Error(Errc::kInsufficientData, "no support documents");
      if (query_docs.empty()) throw Error(Errc::kInsufficientData, "no query documents");
      const auto embedder = det.embed.make();
      Episode support_ep;
      support_ep.id = "support";
      support_ep.documents = support_docs;
      const auto support = embed_episode(support_ep, *embedder);
      std::optional<PlattCalibrator> platt;
      if (!det.calibrator.empty()) platt = read_platt(det.calibrator);
      std::vector<double> scores(query_docs.size());
      std::vector<std::exception_ptr> errors(query_docs.size());
      const auto nq = static_cast<std::ptrdiff_t>(query_docs.size());
#pragma omp parallel for schedule(dynamic)
      for (std::ptrdiff_t i = 0; i < nq; ++i) {
        try {
          scores[i] = cosine_score(support, embedder->embed(query_docs[i]));
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
      for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
      write_output(det.output, out, [&](std::ostream& o) {
        o << (platt ? "query_id,score,probability\n" : "query_id,score\n");
        char buf[64];
        for (std::size_t i = 0; i < query_docs.size(); ++i) {
          std::snprintf(buf, sizeof buf, "%.17g", scores[i]);
          o << csv_field(query_docs[i].id) << ',' << buf;
          if (platt) {
            std::snprintf(buf, sizeof buf, "%.17g", apply_platt(*platt, scores[i]));
            o << ',' << buf;
          }
          o << '\n';
        }
      });
    } else if (*train_proj) {
      tp.cfg.batch_composition = parse_composition(tp.composition);
      const auto episodes = read_manifest_file(tp.episodes);
      const auto base = tp.embed.make(false);
      const auto result = train_projection(episodes, *base, tp.cfg);
      write_projection(tp.output, result.head);
      if (!tp.log.empty()) write_output(tp.log, out, [&](std::ostream& o) { write_train_log(o, result.log); });
      out << "head " << result.head.d_out << "x" << result.head.d_in;
      if (!result.log.empty()) out << " final loss " << result.log.back().loss;
      out << '\n';
    } else if (*calibrate) {
      const auto records = read_scores_csv(cal.scores);
      std::vector<double> s;
      std::vector<int> l;
      for (const auto& r : records) {
        s.push_back(r.score);
        l.push_back(r.label);
      }
      const auto platt = fit_platt(s, l);
      write_platt(cal.output, platt);
      out << "A " << platt.a << " B " << platt.b << '\n';
    } else if (*train_head) {
      const auto store = read_store(th.store);
      std::vector<int> labels;
      for (const auto& r : store.records) labels.push_back(r.source.is_machine() ? 1 : 0);
      const auto head = train_logistic_head(store.records, labels, th.opts);
      write_logistic(th.output, head);
      std::size_t correct = 0;
      for (std::size_t i = 0; i < store.records.size(); ++i) {
        correct += (head.probability(store.records[i].vector.values) >= 0.5) == (labels[i] == 1);
      }
      out << "training accuracy " << static_cast<double>(correct) / static_cast<double>(labels.size()) << '\n';
    } else if (*zeroshot) {
      if (zs.lm_corpus.empty() == zs.stats.empty()) {
        throw Error(Errc::kInvalidArgument, "give exactly one of --lm-corpus or --stats");
      }
      const auto episodes = read_manifest_file(zs.episodes);
      std::unique_ptr<TokenLikelihoodProvider> provider;
      if (!zs.stats.empty()) {
        provider = std::make_unique<PrecomputedStats>(PrecomputedStats::load_file(zs.stats));
      } else {
        const auto tokenizer = zs.corpus.make_tokenizer();
        IngestOptions opts;
        opts.max_tokens = zs.corpus.max_tokens;
        const auto docs = ingest_corpus_file(zs.lm_corpus, tokenizer, zs.corpus.make_segmenter(), opts);
        std::vector<std::string> texts;
        for (const auto& d : docs) texts.push_back(d.text);
        provider = std::make_unique<NGramLM>(NGramLM::train(texts, tokenizer, zs.lm));
      }
      auto report = zero_shot_eval(episodes, *provider, parse_zero_shot_detector(zs.detector), zs.eval);
      report.config["episodes"] = zs.episodes;
      report.config["lm_corpus"] = zs.lm_corpus;
      report.config["stats"] = zs.stats;
      report.config["order"] = zs.lm.order;
      report.config["alpha"] = zs.lm.alpha;
      write_output(zs.output, out, [&](std::ostream& o) { emit_report(o, report, zs.format); });
    }
  } catch (const Error& e) {
    err << "error[" << errc_name(e.code()) << "]: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error[internal]: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace stylodet::cli
