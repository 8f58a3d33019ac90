#include "stylodet/protocols.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <exception>
#include <functional>
#include <set>

#include "stylodet/common.hpp"
#include "stylodet/metrics.hpp"

namespace stylodet {

Scorer parse_scorer(std::string_view name) {
  if (name == "cosine") return Scorer::kCosine;
  if (name == "prototype") return Scorer::kPrototype;
  throw Error(Errc::kInvalidArgument, "unknown scorer '" + std::string(name) + "' (cosine|prototype)");
}

std::string_view scorer_name(Scorer s) { return s == Scorer::kCosine ? "cosine" : "prototype"; }

Aggregation parse_aggregation(std::string_view name) {
  if (name == "min") return Aggregation::kMin;
  if (name == "max") return Aggregation::kMax;
  throw Error(Errc::kInvalidArgument, "unknown aggregation '" + std::string(name) + "' (min|max)");
}

std::string_view aggregation_name(Aggregation a) { return a == Aggregation::kMin ? "min" : "max"; }

Protocol parse_protocol(std::string_view name) {
  if (name == "single") return Protocol::kSingle;
  if (name == "multi") return Protocol::kMulti;
  if (name == "unknown") return Protocol::kUnknown;
  throw Error(Errc::kInvalidArgument, "unknown protocol '" + std::string(name) + "'");
}

std::string_view protocol_name(Protocol p) {
  switch (p) {
    case Protocol::kSingle: return "single";
    case Protocol::kMulti: return "multi";
    case Protocol::kUnknown: return "unknown";
  }
  return "single";
}

void EvalConfig::validate() const {
  if (episode_size < 1) throw Error(Errc::kInvalidArgument, "episode size must be >= 1");
  if (!(max_fpr > 0.0 && max_fpr <= 1.0)) throw Error(Errc::kInvalidArgument, "max_fpr must lie in (0, 1]");
  if (trials < 1) throw Error(Errc::kInvalidArgument, "trials must be >= 1");
  if (bootstrap < 2) throw Error(Errc::kInvalidArgument, "bootstrap resamples must be >= 2");
  for (double p : paraphrase_proportions) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(Errc::kInvalidArgument, "paraphrase proportions must lie in [0, 1]");
  }
}

nlohmann::ordered_json EvalConfig::to_json() const {
  nlohmann::ordered_json j;
  j["episode_size"] = episode_size;
  j["max_fpr"] = max_fpr;
  j["trials"] = trials;
  j["bootstrap"] = bootstrap;
  j["seed"] = seed;
  j["scorer"] = scorer_name(scorer);
  j["aggregation"] = aggregation_name(aggregation);
  j["paraphrase_proportions"] = paraphrase_proportions;
  j["paraphrase_defended"] = paraphrase_defended;
  return j;
}

EvalConfig EvalConfig::from_json(const nlohmann::json& j) {
  EvalConfig c;
  try {
    if (j.contains("episode_size")) c.episode_size = j.at("episode_size").get<std::size_t>();
    if (j.contains("max_fpr")) c.max_fpr = j.at("max_fpr").get<double>();
    if (j.contains("trials")) c.trials = j.at("trials").get<std::size_t>();
    if (j.contains("bootstrap")) c.bootstrap = j.at("bootstrap").get<std::size_t>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("scorer")) c.scorer = parse_scorer(j.at("scorer").get<std::string>());
    if (j.contains("aggregation")) c.aggregation = parse_aggregation(j.at("aggregation").get<std::string>());
    if (j.contains("paraphrase_proportions")) {
      c.paraphrase_proportions = j.at("paraphrase_proportions").get<std::vector<double>>();
    }
    if (j.contains("paraphrase_defended")) c.paraphrase_defended = j.at("paraphrase_defended").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kMalformedRecord, std::string("bad config: ") + e.what());
  }
  return c;
}

namespace {

constexpr const char* kMetricNames[] = {"pauc", "auc", "fpr95"};
constexpr std::size_t kMetricCount = 3;

std::vector<CurveMetric> curve_metrics(double max_fpr) {
  return {[max_fpr](const RocCurve& c) { return pauc(c, max_fpr); }, [](const RocCurve& c) { return auc(c); },
          [](const RocCurve& c) { return fpr_at_tpr(c, 0.95); }};
}

struct DomainGroups {
  std::map<std::string, std::vector<std::size_t>> models;
  std::vector<std::size_t> humans;
};

std::map<std::string, DomainGroups> group_by_domain(std::span<const EmbeddedEpisode> episodes) {
  std::map<std::string, DomainGroups> out;
  for (std::size_t i = 0; i < episodes.size(); ++i) {
    auto& g = out[episodes[i].domain];
    if (episodes[i].source.is_machine()) {
      g.models[episodes[i].source.model_name].push_back(i);
    } else {
      g.humans.push_back(i);
    }
  }
  return out;
}

double score_one(const EvalConfig& c, const EmbeddingVector& support, const EmbeddingVector& query) {
  if (c.scorer == Scorer::kCosine) return cosine_score(support, query);
  return prototype_score(std::span<const EmbeddingVector>(&support, 1), query);
}

double score_many(const EvalConfig& c, std::span<const EmbeddingVector> supports, const EmbeddingVector& query) {
  if (c.scorer == Scorer::kCosine) return multi_target_score(supports, query, c.aggregation);
  double best = score_one(c, supports.front(), query);
  for (std::size_t i = 1; i < supports.size(); ++i) {
    const double s = score_one(c, supports[i], query);
    best = c.aggregation == Aggregation::kMin ? std::min(best, s) : std::max(best, s);
  }
  return best;
}

template <typename F>
void for_each_index(std::size_t n, bool parallel, F&& body) {
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

struct Measured {
  double value[kMetricCount] = {0, 0, 0};
  double se[kMetricCount] = {0, 0, 0};
};

Measured measure(std::span<const ScoreRecord> records, const EvalConfig& c, std::uint64_t seed, bool with_se) {
  Measured m;
  const auto metrics = curve_metrics(c.max_fpr);
  if (!with_se) {
    const auto curve = roc_curve(records);
    for (std::size_t k = 0; k < kMetricCount; ++k) m.value[k] = metrics[k](curve);
    return m;
  }
  BootstrapOptions opts;
  opts.resamples = c.bootstrap;
  opts.seed = seed;
  opts.parallel = false;
  const auto r = bootstrap_metrics(records, metrics, opts);
  for (std::size_t k = 0; k < kMetricCount; ++k) {
    m.value[k] = r[k].estimate;
    m.se[k] = r[k].se;
  }
  return m;
}

void add_overall(EvalReport& report) {
  for (std::size_t k = 0; k < kMetricCount; ++k) {
    double sum = 0.0;
    double sq = 0.0;
    std::size_t rows = 0;
    std::size_t n = 0;
    for (const auto& r : report.per_domain) {
      if (r.metric != kMetricNames[k]) continue;
      sum += r.mean;
      sq += r.se * r.se;
      n += r.n;
      ++rows;
    }
    if (rows == 0) continue;
    const double kr = static_cast<double>(rows);
    report.overall.push_back({"all", "all", kMetricNames[k], sum / kr, std::sqrt(sq) / kr, n});
  }
}

EvalReport new_report(std::string_view protocol, const EvalConfig& c) {
  EvalReport r;
  r.protocol = std::string(protocol);
  r.config = c.to_json();
  return r;
}

// ---- single-target core ----

struct SupportTask {
  std::size_t support = 0;
  std::string domain;
  std::string model;
  std::vector<std::size_t> positives;
  std::vector<std::size_t> negatives;
};

std::vector<SupportTask> support_tasks(std::span<const EmbeddedEpisode> episodes, EvalReport& report) {
  std::vector<SupportTask> tasks;
  for (const auto& [domain, g] : group_by_domain(episodes)) {
    if (g.humans.empty()) {
      report.warnings.push_back("domain '" + domain + "' has no human episodes; skipped");
      continue;
    }
    for (const auto& [model, members] : g.models) {
      if (members.size() < 2) {
        report.warnings.push_back("model '" + model + "' in domain '" + domain + "' has " +
                                  std::to_string(members.size()) + " episode; skipped");
        continue;
      }
      for (std::size_t s : members) {
        SupportTask t{s, domain, model, {}, g.humans};
        for (std::size_t q : members) {
          if (q != s) t.positives.push_back(q);
        }
        tasks.push_back(std::move(t));
      }
    }
  }
  return tasks;
}

// Scores one task into records; query(i) gives the vector used for episode i.
using TaskScorer = std::function<std::vector<ScoreRecord>(const SupportTask&)>;

EvalReport run_support_tasks(std::span<const EmbeddedEpisode> episodes, const EvalConfig& c, std::string_view protocol,
                             const TaskScorer& scorer, std::vector<std::string> warnings_in = {}) {
  auto report = new_report(protocol, c);
  report.warnings = std::move(warnings_in);
  const auto tasks = support_tasks(episodes, report);
  std::vector<std::vector<ScoreRecord>> records(tasks.size());
  std::vector<Measured> measured(tasks.size());
  for_each_index(tasks.size(), c.parallel, [&](std::size_t i) {
    records[i] = scorer(tasks[i]);
    measured[i] = measure(records[i], c, derive_seed(c.seed, fnv1a64(episodes[tasks[i].support].id)), true);
  });

  for (std::size_t begin = 0; begin < tasks.size();) {
    std::size_t end = begin;
    while (end < tasks.size() && tasks[end].domain == tasks[begin].domain && tasks[end].model == tasks[begin].model) {
      ++end;
    }
    const double n = static_cast<double>(end - begin);
    for (std::size_t k = 0; k < kMetricCount; ++k) {
      double sum = 0.0;
      double sq = 0.0;
      for (std::size_t i = begin; i < end; ++i) {
        sum += measured[i].value[k];
        sq += measured[i].se[k] * measured[i].se[k];
      }
      report.per_domain.push_back(
          {tasks[begin].domain, tasks[begin].model, kMetricNames[k], sum / n, std::sqrt(sq) / n, end - begin});
    }
    begin = end;
  }
  add_overall(report);
  if (c.keep_records) {
    for (auto& r : records) report.records.insert(report.records.end(), r.begin(), r.end());
  }
  return report;
}

std::vector<ScoreRecord> score_task(std::span<const EmbeddedEpisode> episodes, const SupportTask& t, const EvalConfig& c) {
  const auto& support = episodes[t.support];
  std::vector<ScoreRecord> out;
  out.reserve(t.positives.size() + t.negatives.size());
  for (std::size_t q : t.positives) out.push_back({episodes[q].id, score_one(c, support.pooled, episodes[q].pooled), 1, support.id});
  for (std::size_t q : t.negatives) out.push_back({episodes[q].id, score_one(c, support.pooled, episodes[q].pooled), 0, support.id});
  return out;
}

// Trial-level summary: mean of per-trial values and bootstrap SE of the mean.
void add_trial_rows(EvalReport& report, const std::string& domain, const std::string& model,
                    const std::vector<Measured>& trials, const EvalConfig& c, std::uint64_t seed) {
  for (std::size_t k = 0; k < kMetricCount; ++k) {
    std::vector<double> values;
    values.reserve(trials.size());
    for (const auto& m : trials) values.push_back(m.value[k]);
    double sum = 0.0;
    for (double v : values) sum += v;
    const double se = bootstrap_mean_se(values, c.bootstrap, derive_seed(seed, k));
    report.per_domain.push_back({domain, model, kMetricNames[k], sum / static_cast<double>(values.size()), se,
                                 values.size()});
  }
}

}  // namespace

EvalReport single_target_eval(std::span<const EmbeddedEpisode> episodes, const EvalConfig& config) {
  config.validate();
  return run_support_tasks(episodes, config, "single",
                           [&](const SupportTask& t) { return score_task(episodes, t, config); });
}

EvalReport multi_target_eval(std::span<const EmbeddedEpisode> episodes, const EvalConfig& config) {
  config.validate();
  auto report = new_report("multi", config);
  for (const auto& [domain, g] : group_by_domain(episodes)) {
    if (g.humans.empty() || g.models.empty()) {
      report.warnings.push_back("domain '" + domain + "' lacks human or machine episodes; skipped");
      continue;
    }
    std::size_t machine_total = 0;
    for (const auto& [model, members] : g.models) machine_total += members.size();
    if (machine_total <= g.models.size()) {
      report.warnings.push_back("domain '" + domain + "' leaves no machine query after choosing supports; skipped");
      continue;
    }
    const std::uint64_t domain_key = fnv1a64(domain);
    std::vector<Measured> trials(config.trials);
    std::vector<std::vector<ScoreRecord>> records(config.trials);
    for_each_index(config.trials, config.parallel, [&](std::size_t t) {
      Rng rng(derive_seed(config.seed, domain_key, t));
      std::vector<std::size_t> chosen;
      std::vector<EmbeddingVector> supports;
      std::string support_id;
      for (const auto& [model, members] : g.models) {
        const std::size_t s = members[rng.uniform_below(members.size())];
        chosen.push_back(s);
        supports.push_back(episodes[s].pooled);
        support_id += (support_id.empty() ? "" : "+") + episodes[s].id;
      }
      auto& recs = records[t];
      for (const auto& [model, members] : g.models) {
        for (std::size_t q : members) {
          if (std::find(chosen.begin(), chosen.end(), q) != chosen.end()) continue;
          recs.push_back({episodes[q].id, score_many(config, supports, episodes[q].pooled), 1, support_id});
        }
      }
      for (std::size_t q : g.humans) {
        recs.push_back({episodes[q].id, score_many(config, supports, episodes[q].pooled), 0, support_id});
      }
      trials[t] = measure(recs, config, 0, false);
    });
    add_trial_rows(report, domain, "all", trials, config, derive_seed(config.seed, domain_key));
    if (config.keep_records) {
      for (auto& r : records) report.records.insert(report.records.end(), r.begin(), r.end());
    }
  }
  add_overall(report);
  return report;
}

EvalReport unknown_llm_eval(std::span<const EmbeddedEpisode> episodes, const EvalConfig& config) {
  config.validate();
  auto report = new_report("unknown", config);
  const std::size_t n_support = config.episode_size;
  for (const auto& [domain, g] : group_by_domain(episodes)) {
    if (g.humans.empty() || g.models.empty()) {
      report.warnings.push_back("domain '" + domain + "' lacks human or machine episodes; skipped");
      continue;
    }
    // (episode, document) for every machine document in the domain.
    std::vector<std::pair<std::size_t, std::size_t>> pool;
    std::vector<std::size_t> machine;
    for (const auto& [model, members] : g.models) {
      for (std::size_t e : members) {
        machine.push_back(e);
        if (episodes[e].documents.empty()) {
          throw Error(Errc::kInsufficientData,
                      "unknown-LLM evaluation needs per-document embeddings (episode '" + episodes[e].id + "')");
        }
        for (std::size_t d = 0; d < episodes[e].documents.size(); ++d) pool.emplace_back(e, d);
      }
    }
    if (pool.size() < n_support) {
      throw Error(Errc::kInsufficientData, "domain '" + domain + "' has " + std::to_string(pool.size()) +
                                               " machine documents, fewer than N=" + std::to_string(n_support));
    }
    const std::uint64_t domain_key = fnv1a64("unknown/" + domain);
    std::vector<Measured> trials(config.trials);
    std::vector<std::vector<ScoreRecord>> records(config.trials);
    for_each_index(config.trials, config.parallel, [&](std::size_t t) {
      Rng rng(derive_seed(config.seed, domain_key, t));
      std::vector<EmbeddingVector> picked;
      std::set<std::size_t> used_episodes;
      std::string support_id;
      for (std::size_t k : rng.sample_without_replacement(pool.size(), n_support)) {
        const auto [e, d] = pool[k];
        picked.push_back(episodes[e].documents[d]);
        used_episodes.insert(e);
        support_id += (support_id.empty() ? "" : "+") + episodes[e].document_ids[d];
      }
      const auto support = pool_embeddings(picked);
      auto& recs = records[t];
      for (std::size_t q : machine) {
        if (used_episodes.count(q)) continue;
        recs.push_back({episodes[q].id, score_one(config, support, episodes[q].pooled), 1, support_id});
      }
      if (recs.empty()) {
        throw Error(Errc::kInsufficientData,
                    "domain '" + domain + "': every machine episode contributed to the support; no machine queries");
      }
      for (std::size_t q : g.humans) {
        recs.push_back({episodes[q].id, score_one(config, support, episodes[q].pooled), 0, support_id});
      }
      trials[t] = measure(recs, config, 0, false);
    });
    add_trial_rows(report, domain, "any", trials, config, derive_seed(config.seed, domain_key));
    if (config.keep_records) {
      for (auto& r : records) report.records.insert(report.records.end(), r.begin(), r.end());
    }
  }
  add_overall(report);
  return report;
}

EvalReport run_protocol(Protocol protocol, std::span<const EmbeddedEpisode> episodes, const EvalConfig& config) {
  switch (protocol) {
    case Protocol::kSingle: return single_target_eval(episodes, config);
    case Protocol::kMulti: return multi_target_eval(episodes, config);
    case Protocol::kUnknown: return unknown_llm_eval(episodes, config);
  }
  return single_target_eval(episodes, config);
}

std::vector<ParaphrasePoint> paraphrase_eval(std::span<const EmbeddedEpisode> episodes,
                                             const ParaphraseMap& paraphrases, const EvalConfig& config) {
  config.validate();
  auto lookup = [&](const std::string& id) -> const EmbeddingVector& {
    auto it = paraphrases.find(id);
    if (it == paraphrases.end()) throw Error(Errc::kMissingParaphrase, "missing paraphrase for '" + id + "'");
    return it->second.pooled;
  };

  std::vector<ParaphrasePoint> out;
  for (double p : config.paraphrase_proportions) {
    // Which machine queries are paraphrased, fixed per (support, p).
    auto selection = [&](const SupportTask& t) {
      std::vector<bool> chosen(t.positives.size(), false);
      const auto k = static_cast<std::size_t>(std::llround(p * static_cast<double>(t.positives.size())));
      if (k == 0) return chosen;
      Rng rng(derive_seed(config.seed, fnv1a64(episodes[t.support].id), std::bit_cast<std::uint64_t>(p)));
      for (auto i : rng.sample_without_replacement(t.positives.size(), k)) chosen[i] = true;
      return chosen;
    };
    auto query_vector = [&](const SupportTask& t, const std::vector<bool>& chosen, std::size_t i) -> const EmbeddingVector& {
      const auto& ep = episodes[t.positives[i]];
      return chosen[i] ? lookup(ep.id) : ep.pooled;
    };

    auto cfg = config;
    ParaphrasePoint point;
    point.proportion = p;
    point.undefended = run_support_tasks(episodes, cfg, "paraphrase", [&](const SupportTask& t) {
      if (p == 0.0) return score_task(episodes, t, cfg);
      const auto& support = episodes[t.support];
      const auto chosen = selection(t);
      std::vector<ScoreRecord> recs;
      for (std::size_t i = 0; i < t.positives.size(); ++i) {
        recs.push_back({episodes[t.positives[i]].id, score_one(cfg, support.pooled, query_vector(t, chosen, i)), 1,
                        support.id});
      }
      for (std::size_t q : t.negatives) {
        recs.push_back({episodes[q].id, score_one(cfg, support.pooled, episodes[q].pooled), 0, support.id});
      }
      return recs;
    });
    point.undefended.config["proportion"] = p;
    point.undefended.config["mode"] = "undefended";

    if (config.paraphrase_defended) {
      point.defended = run_support_tasks(episodes, cfg, "paraphrase", [&](const SupportTask& t) {
        const auto& support = episodes[t.support];
        const auto& para_support = lookup(support.id);
        const auto chosen = selection(t);
        std::vector<ScoreRecord> recs;
        for (std::size_t i = 0; i < t.positives.size(); ++i) {
          recs.push_back({episodes[t.positives[i]].id,
                          defended_score(support.pooled, para_support, query_vector(t, chosen, i)), 1, support.id});
        }
        for (std::size_t q : t.negatives) {
          recs.push_back({episodes[q].id, defended_score(support.pooled, para_support, episodes[q].pooled), 0,
                          support.id});
        }
        return recs;
      });
      point.defended->config["proportion"] = p;
      point.defended->config["mode"] = "defended";
    }
    out.push_back(std::move(point));
  }
  return out;
}

std::vector<std::pair<std::size_t, EvalReport>> sweep_n(const std::vector<Document>& documents,
                                                        const DocumentEmbedder& embedder, const EvalConfig& config,
                                                        std::span<const std::size_t> n_values, Protocol protocol) {
  std::vector<std::pair<std::size_t, EvalReport>> out;
  for (std::size_t n : n_values) {
    auto cfg = config;
    cfg.episode_size = n;
    cfg.validate();
    const auto episodes = build_episodes(documents, n, config.seed);
    const auto embedded = embed_episodes(episodes, embedder, {}, config.parallel);
    out.emplace_back(n, run_protocol(protocol, embedded, cfg));
  }
  return out;
}

EvalReport zero_shot_eval(std::span<const Episode> episodes, const TokenLikelihoodProvider& provider,
                          ZeroShotDetector detector, const EvalConfig& config) {
  config.validate();
  auto report = new_report("zeroshot", config);
  report.config["detector"] = zero_shot_detector_name(detector);
  std::vector<double> scores(episodes.size());
  for_each_index(episodes.size(), config.parallel,
                 [&](std::size_t i) { scores[i] = zero_shot_episode_score(detector, episodes[i], provider); });

  std::map<std::string, DomainGroups> groups;
  for (std::size_t i = 0; i < episodes.size(); ++i) {
    auto& g = groups[episodes[i].domain];
    if (episodes[i].source.is_machine()) {
      g.models[episodes[i].source.model_name].push_back(i);
    } else {
      g.humans.push_back(i);
    }
  }
  for (const auto& [domain, g] : groups) {
    if (g.humans.empty()) {
      report.warnings.push_back("domain '" + domain + "' has no human episodes; skipped");
      continue;
    }
    for (const auto& [model, members] : g.models) {
      std::vector<ScoreRecord> recs;
      for (std::size_t q : members) recs.push_back({episodes[q].id, scores[q], 1, ""});
      for (std::size_t q : g.humans) recs.push_back({episodes[q].id, scores[q], 0, ""});
      const auto m = measure(recs, config, derive_seed(config.seed, fnv1a64(domain + '\x1f' + model)), true);
      for (std::size_t k = 0; k < kMetricCount; ++k) {
        report.per_domain.push_back({domain, model, kMetricNames[k], m.value[k], m.se[k], members.size()});
      }
      if (config.keep_records) report.records.insert(report.records.end(), recs.begin(), recs.end());
    }
  }
  add_overall(report);
  return report;
}

}  // namespace stylodet
