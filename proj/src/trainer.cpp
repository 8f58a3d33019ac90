#include "stylodet/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>

#include <json.hpp>

#include "stylodet/common.hpp"

namespace stylodet {

void ContrastiveConfig::validate() const {
  if (!(temperature > 0.0)) throw Error(Errc::kInvalidArgument, "temperature must be positive");
  if (batch_pairs < 2) throw Error(Errc::kInvalidArgument, "batch_pairs must be at least 2");
  if (!(learning_rate > 0.0)) throw Error(Errc::kInvalidArgument, "learning_rate must be positive");
  if (output_dim == 0) throw Error(Errc::kInvalidArgument, "output_dim must be positive");
}

// ---- batch sampling ----

namespace {

struct TimeRange {
  std::int64_t first;
  std::int64_t last;
};

std::optional<TimeRange> time_range(const Episode& ep) {
  if (ep.documents.empty()) return std::nullopt;
  TimeRange r{std::numeric_limits<std::int64_t>::max(), std::numeric_limits<std::int64_t>::min()};
  for (const auto& d : ep.documents) {
    if (!d.timestamp) return std::nullopt;
    r.first = std::min(r.first, *d.timestamp);
    r.last = std::max(r.last, *d.timestamp);
  }
  return r;
}

bool valid_pair(const Episode& a, const Episode& b) {
  const auto ra = time_range(a);
  const auto rb = time_range(b);
  if (!ra || !rb) return true;
  return ra->last < rb->first || rb->last < ra->first;
}

struct AuthorEntry {
  std::string author;
  bool machine = false;
  std::vector<std::size_t> episodes;
};

std::vector<ContrastivePair> candidate_pairs(std::span<const Episode> episodes, const std::vector<std::size_t>& members,
                                             const std::string* domain) {
  std::vector<ContrastivePair> out;
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      const auto& a = episodes[members[i]];
      const auto& b = episodes[members[j]];
      if (domain && (a.domain != *domain || b.domain != *domain)) continue;
      if (valid_pair(a, b)) out.push_back({members[i], members[j]});
    }
  }
  return out;
}

ContrastivePair draw_pair(const std::vector<ContrastivePair>& candidates, Rng& rng) {
  auto p = candidates[rng.uniform_below(candidates.size())];
  if (rng.uniform_below(2) == 1) std::swap(p.anchor, p.positive);
  return p;
}

}  // namespace

std::vector<ContrastivePair> sample_contrastive_batch(std::span<const Episode> episodes,
                                                      const ContrastiveConfig& config, Rng& rng) {
  config.validate();
  std::map<std::string, AuthorEntry> by_author;
  for (std::size_t i = 0; i < episodes.size(); ++i) {
    auto& entry = by_author[episodes[i].author];
    entry.author = episodes[i].author;
    entry.machine = entry.machine || episodes[i].source.is_machine();
    entry.episodes.push_back(i);
  }

  std::vector<const AuthorEntry*> eligible;
  std::vector<std::vector<ContrastivePair>> eligible_pairs;
  for (const auto& [name, entry] : by_author) {
    auto pairs = candidate_pairs(episodes, entry.episodes, nullptr);
    if (pairs.empty()) continue;
    eligible.push_back(&entry);
    eligible_pairs.push_back(std::move(pairs));
  }
  const std::size_t want = config.batch_pairs;
  if (eligible.size() < want) {
    throw Error(Errc::kInsufficientData, "insufficient authors: need " + std::to_string(want) +
                                             " with two usable episodes, have " + std::to_string(eligible.size()));
  }

  std::vector<ContrastivePair> batch;
  switch (config.batch_composition) {
    case BatchComposition::kNone: {
      for (auto k : rng.sample_without_replacement(eligible.size(), want)) {
        batch.push_back(draw_pair(eligible_pairs[k], rng));
      }
      break;
    }
    case BatchComposition::kHalfHumanHalfMachine: {
      if (want % 2 != 0) throw Error(Errc::kCompositionUnsatisfiable, "composition unsatisfiable: odd batch size");
      std::vector<std::size_t> humans;
      std::vector<std::size_t> machines;
      for (std::size_t k = 0; k < eligible.size(); ++k) (eligible[k]->machine ? machines : humans).push_back(k);
      if (humans.size() < want / 2 || machines.size() < want / 2) {
        throw Error(Errc::kCompositionUnsatisfiable,
                    "composition unsatisfiable: need " + std::to_string(want / 2) + " human and machine authors, have " +
                        std::to_string(humans.size()) + " and " + std::to_string(machines.size()));
      }
      for (auto k : rng.sample_without_replacement(humans.size(), want / 2)) {
        batch.push_back(draw_pair(eligible_pairs[humans[k]], rng));
      }
      for (auto k : rng.sample_without_replacement(machines.size(), want / 2)) {
        batch.push_back(draw_pair(eligible_pairs[machines[k]], rng));
      }
      rng.shuffle(batch);
      break;
    }
    case BatchComposition::kAllDomainsPresent: {
      // Per-domain candidate pairs for every eligible author.
      std::map<std::string, std::vector<std::pair<std::size_t, std::vector<ContrastivePair>>>> by_domain;
      for (std::size_t k = 0; k < eligible.size(); ++k) {
        std::set<std::string> domains;
        for (auto e : eligible[k]->episodes) domains.insert(episodes[e].domain);
        for (const auto& d : domains) {
          auto pairs = candidate_pairs(episodes, eligible[k]->episodes, &d);
          if (!pairs.empty()) by_domain[d].emplace_back(k, std::move(pairs));
        }
      }
      std::set<std::string> all_domains;
      for (const auto& ep : episodes) all_domains.insert(ep.domain);
      if (all_domains.size() > want) {
        throw Error(Errc::kCompositionUnsatisfiable, "composition unsatisfiable: more domains than pairs per batch");
      }
      // Most constrained domain first.
      std::vector<std::string> order(all_domains.begin(), all_domains.end());
      std::stable_sort(order.begin(), order.end(), [&](const std::string& a, const std::string& b) {
        return by_domain[a].size() < by_domain[b].size();
      });
      std::vector<bool> used(eligible.size(), false);
      for (const auto& d : order) {
        std::vector<std::size_t> open;
        const auto& cands = by_domain[d];
        for (std::size_t c = 0; c < cands.size(); ++c) {
          if (!used[cands[c].first]) open.push_back(c);
        }
        if (open.empty()) {
          throw Error(Errc::kCompositionUnsatisfiable, "composition unsatisfiable: no free author for domain '" + d + "'");
        }
        const auto& chosen = cands[open[rng.uniform_below(open.size())]];
        used[chosen.first] = true;
        batch.push_back(draw_pair(chosen.second, rng));
      }
      std::vector<std::size_t> rest;
      for (std::size_t k = 0; k < eligible.size(); ++k) {
        if (!used[k]) rest.push_back(k);
      }
      for (auto k : rng.sample_without_replacement(rest.size(), want - batch.size())) {
        batch.push_back(draw_pair(eligible_pairs[rest[k]], rng));
      }
      rng.shuffle(batch);
      break;
    }
  }
  return batch;
}

// ---- InfoNCE ----

InfoNceResult info_nce_loss(std::span<const std::vector<double>> anchors,
                            std::span<const std::vector<double>> positives, double temperature) {
  if (!(temperature > 0.0)) throw Error(Errc::kInvalidArgument, "temperature must be positive");
  const std::size_t m = anchors.size();
  if (m < 2 || positives.size() != m) throw Error(Errc::kInvalidArgument, "InfoNCE needs M >= 2 anchor/positive pairs");
  const std::size_t dim = anchors.front().size();
  for (std::size_t i = 0; i < m; ++i) {
    if (anchors[i].size() != dim || positives[i].size() != dim) throw Error(Errc::kDimMismatch, "InfoNCE dims differ");
  }

  auto norm = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
  };
  std::vector<double> na(m), np(m);
  for (std::size_t i = 0; i < m; ++i) {
    na[i] = norm(anchors[i]);
    np[i] = norm(positives[i]);
    if (na[i] == 0.0 || np[i] == 0.0) throw Error(Errc::kDegenerateEpisode, "InfoNCE input is a zero vector");
  }

  // cos[i][j] = cos(a_i, p_j); grad_s[i][j] = dL/dcos[i][j].
  std::vector<std::vector<double>> cos(m, std::vector<double>(m));
  std::vector<std::vector<double>> grad_s(m, std::vector<double>(m));
  std::vector<double> row_loss(m);
  const auto mm = static_cast<std::ptrdiff_t>(m);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < mm; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double d = 0.0;
      for (std::size_t k = 0; k < dim; ++k) d += anchors[i][k] * positives[j][k];
      cos[i][j] = d / (na[i] * np[j]);
    }
    double max_logit = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m; ++j) max_logit = std::max(max_logit, cos[i][j] / temperature);
    double z = 0.0;
    for (std::size_t j = 0; j < m; ++j) z += std::exp(cos[i][j] / temperature - max_logit);
    const double log_z = max_logit + std::log(z);
    row_loss[i] = log_z - cos[i][i] / temperature;
    for (std::size_t j = 0; j < m; ++j) {
      const double softmax = std::exp(cos[i][j] / temperature - log_z);
      grad_s[i][j] = (softmax - (static_cast<std::size_t>(i) == j ? 1.0 : 0.0)) / (static_cast<double>(m) * temperature);
    }
  }

  InfoNceResult out;
  for (double l : row_loss) out.loss += l;
  out.loss /= static_cast<double>(m);
  out.anchor_grads.assign(m, std::vector<double>(dim, 0.0));
  out.positive_grads.assign(m, std::vector<double>(dim, 0.0));

  // d cos(a,p)/da = p/(|a||p|) - cos a/|a|^2, symmetric for p.
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < mm; ++i) {
    auto& g = out.anchor_grads[i];
    for (std::size_t j = 0; j < m; ++j) {
      const double w = grad_s[i][j];
      const double c1 = w / (na[i] * np[j]);
      const double c2 = w * cos[i][j] / (na[i] * na[i]);
      for (std::size_t k = 0; k < dim; ++k) g[k] += c1 * positives[j][k] - c2 * anchors[i][k];
    }
  }
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < mm; ++j) {
    auto& g = out.positive_grads[j];
    for (std::size_t i = 0; i < m; ++i) {
      const double w = grad_s[i][j];
      const double c1 = w / (na[i] * np[j]);
      const double c2 = w * cos[i][j] / (np[j] * np[j]);
      for (std::size_t k = 0; k < dim; ++k) g[k] += c1 * anchors[i][k] - c2 * positives[j][k];
    }
  }
  return out;
}

// ---- projection training ----

ProjectionHead init_projection(std::size_t d_in, std::size_t d_out, std::uint64_t seed) {
  ProjectionHead head{d_in, d_out, std::vector<double>(d_in * d_out)};
  Rng rng(derive_seed(seed, 0x1417));
  const double scale = 1.0 / std::sqrt(static_cast<double>(d_in));
  for (auto& w : head.weights) w = rng.normal() * scale;
  head.validate();
  return head;
}

namespace {

std::vector<double> project(const ProjectionHead& head, const EmbeddingVector& x) { return head.apply(x.values); }

}  // namespace

double projection_loss(const ProjectionHead& head, std::span<const EmbeddingVector> base,
                       std::span<const ContrastivePair> pairs, double temperature) {
  std::vector<std::vector<double>> za, zp;
  for (const auto& p : pairs) {
    za.push_back(project(head, base[p.anchor]));
    zp.push_back(project(head, base[p.positive]));
  }
  return info_nce_loss(za, zp, temperature).loss;
}

ProjectionTraining train_projection(std::span<const Episode> episodes, std::span<const EmbeddingVector> base,
                                    const ContrastiveConfig& config) {
  config.validate();
  if (base.size() != episodes.size()) throw Error(Errc::kInvalidArgument, "one base embedding per episode required");
  if (base.empty()) throw Error(Errc::kInsufficientData, "no episodes to train on");
  const std::size_t d_in = base.front().dim();
  const std::size_t d_out = std::min(config.output_dim, d_in);

  ProjectionTraining out{init_projection(d_in, d_out, config.seed), {}};
  auto& w = out.head.weights;
  for (std::size_t step = 0; step < config.steps; ++step) {
    Rng rng(derive_seed(config.seed, step));
    const auto pairs = sample_contrastive_batch(episodes, config, rng);
    std::vector<std::vector<double>> za, zp;
    for (const auto& p : pairs) {
      za.push_back(project(out.head, base[p.anchor]));
      zp.push_back(project(out.head, base[p.positive]));
    }
    const auto r = info_nce_loss(za, zp, config.temperature);
    if (!std::isfinite(r.loss)) {
      throw Error(Errc::kDivergence, "training diverged: non-finite loss at step " + std::to_string(step));
    }
    out.log.push_back({step, r.loss});

    // dL/dW = sum_i g_i x_i^T over anchors and positives; rows update independently.
    const auto rows = static_cast<std::ptrdiff_t>(d_out);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t row = 0; row < rows; ++row) {
      double* wr = w.data() + row * static_cast<std::ptrdiff_t>(d_in);
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        const double ga = r.anchor_grads[i][row] * config.learning_rate;
        const double gp = r.positive_grads[i][row] * config.learning_rate;
        const auto& xa = base[pairs[i].anchor].values;
        const auto& xp = base[pairs[i].positive].values;
        for (std::size_t c = 0; c < d_in; ++c) wr[c] -= ga * xa[c] + gp * xp[c];
      }
    }
    for (double x : w) {
      if (!std::isfinite(x)) {
        throw Error(Errc::kDivergence, "training diverged: non-finite weight after step " + std::to_string(step));
      }
    }
  }
  return out;
}

ProjectionTraining train_projection(std::span<const Episode> episodes, const DocumentEmbedder& base,
                                    const ContrastiveConfig& config) {
  std::vector<EmbeddingVector> vectors(episodes.size());
  const auto n = static_cast<std::ptrdiff_t>(episodes.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) vectors[i] = embed_episode(episodes[i], base);
  return train_projection(episodes, vectors, config);
}

void write_train_log(std::ostream& out, std::span<const TrainLogEntry> log) {
  for (const auto& e : log) {
    nlohmann::ordered_json j;
    j["step"] = e.step;
    j["loss"] = e.loss;
    out << j.dump() << '\n';
  }
}

// ---- Platt scaling ----

namespace {

// -log likelihood term for one sample at f = A s + B, computed stably.
double platt_term(double t, double f) {
  return f >= 0 ? t * f + std::log1p(std::exp(-f)) : (t - 1.0) * f + std::log1p(std::exp(f));
}

}  // namespace

double apply_platt(const PlattCalibrator& cal, double score) {
  const double f = cal.a * score + cal.b;
  return f >= 0 ? std::exp(-f) / (1.0 + std::exp(-f)) : 1.0 / (1.0 + std::exp(f));
}

PlattCalibrator fit_platt(std::span<const double> scores, std::span<const int> labels, PlattOptions options) {
  if (scores.size() != labels.size()) throw Error(Errc::kInvalidArgument, "scores and labels differ in length");
  double n_pos = 0;
  double n_neg = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!std::isfinite(scores[i])) throw Error(Errc::kNonFinite, "non-finite score");
    if (labels[i] == 1) {
      n_pos += 1;
    } else if (labels[i] == 0) {
      n_neg += 1;
    } else {
      throw Error(Errc::kInvalidArgument, "labels must be 0 or 1");
    }
  }
  if (n_pos == 0 || n_neg == 0) throw Error(Errc::kSingleClass, "Platt scaling requires both classes");

  const double hi = (n_pos + 1.0) / (n_pos + 2.0);
  const double lo = 1.0 / (n_neg + 2.0);
  std::vector<double> t(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) t[i] = labels[i] == 1 ? hi : lo;

  constexpr double kMinStep = 1e-10;
  constexpr double kSigma = 1e-12;
  double a = 0.0;
  double b = std::log((n_neg + 1.0) / (n_pos + 1.0));
  auto objective = [&](double aa, double bb) {
    double f = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) f += platt_term(t[i], scores[i] * aa + bb);
    return f;
  };
  double fval = objective(a, b);

  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    double h11 = kSigma, h22 = kSigma, h21 = 0.0, g1 = 0.0, g2 = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double f = scores[i] * a + b;
      double p, q;
      if (f >= 0) {
        p = std::exp(-f) / (1.0 + std::exp(-f));
        q = 1.0 / (1.0 + std::exp(-f));
      } else {
        p = 1.0 / (1.0 + std::exp(f));
        q = std::exp(f) / (1.0 + std::exp(f));
      }
      const double d2 = p * q;
      h11 += scores[i] * scores[i] * d2;
      h22 += d2;
      h21 += scores[i] * d2;
      const double d1 = t[i] - p;
      g1 += scores[i] * d1;
      g2 += d1;
    }
    if (std::hypot(g1, g2) < options.gradient_tolerance) break;

    const double det = h11 * h22 - h21 * h21;
    const double da = -(h22 * g1 - h21 * g2) / det;
    const double db = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * da + g2 * db;
    double step = 1.0;
    bool accepted = false;
    while (step >= kMinStep) {
      const double na = a + step * da;
      const double nb = b + step * db;
      const double nf = objective(na, nb);
      if (nf < fval + 1e-4 * step * gd) {
        a = na;
        b = nb;
        fval = nf;
        accepted = true;
        break;
      }
      step /= 2.0;
    }
    if (!accepted) break;
  }
  return {a, b};
}

// ---- logistic head ----

double LogisticHead::logit(std::span<const float> x) const {
  if (x.size() != w.size()) throw Error(Errc::kDimMismatch, "logistic head dim mismatch");
  double z = b;
  for (std::size_t i = 0; i < w.size(); ++i) z += w[i] * static_cast<double>(x[i]);
  return z;
}

double LogisticHead::probability(std::span<const float> x) const {
  const double z = logit(x);
  return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

LogisticLoss logistic_loss(const LogisticHead& head, std::span<const EmbeddingVector> x, std::span<const int> labels,
                           double l2_penalty) {
  if (x.size() != labels.size() || x.empty()) throw Error(Errc::kInvalidArgument, "logistic loss: bad inputs");
  LogisticLoss out;
  out.grad_w.assign(head.w.size(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double y = labels[i] == 1 ? 1.0 : -1.0;
    const double margin = y * head.logit(x[i].values);
    // softplus(-margin) and its derivative sigmoid(-margin), both stable.
    const double loss = margin >= 0 ? std::log1p(std::exp(-margin)) : -margin + std::log1p(std::exp(margin));
    const double sig = margin >= 0 ? std::exp(-margin) / (1.0 + std::exp(-margin)) : 1.0 / (1.0 + std::exp(margin));
    out.loss += loss * inv_n;
    const double coef = -y * sig * inv_n;
    for (std::size_t k = 0; k < head.w.size(); ++k) out.grad_w[k] += coef * static_cast<double>(x[i].values[k]);
    out.grad_b += coef;
  }
  double wsq = 0.0;
  for (std::size_t k = 0; k < head.w.size(); ++k) {
    wsq += head.w[k] * head.w[k];
    out.grad_w[k] += l2_penalty * head.w[k];
  }
  out.loss += 0.5 * l2_penalty * wsq;
  return out;
}

LogisticHead train_logistic_head(std::span<const EmbeddingVector> x, std::span<const int> labels,
                                 const LogisticOptions& options) {
  if (x.size() != labels.size() || x.empty()) throw Error(Errc::kInvalidArgument, "logistic head: bad inputs");
  bool has_pos = false;
  bool has_neg = false;
  for (int l : labels) {
    if (l != 0 && l != 1) throw Error(Errc::kInvalidArgument, "labels must be 0 or 1");
    (l == 1 ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg) throw Error(Errc::kSingleClass, "logistic head requires both classes");
  const std::size_t dim = x.front().dim();
  double max_sq = 0.0;
  for (const auto& v : x) {
    if (v.dim() != dim) throw Error(Errc::kDimMismatch, "logistic head inputs differ in dim");
    max_sq = std::max(max_sq, dot(v.values, v.values));
  }

  LogisticHead head;
  head.w.resize(dim);
  Rng rng(derive_seed(options.seed, 0x10915));
  for (auto& wi : head.w) wi = 0.01 * rng.normal();

  // 1/L for the smoothness constant of the regularized logistic loss.
  const double lr = 1.0 / (0.25 * (max_sq + 1.0) + options.l2_penalty);
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    const auto g = logistic_loss(head, x, labels, options.l2_penalty);
    double gsq = g.grad_b * g.grad_b;
    for (double gi : g.grad_w) gsq += gi * gi;
    if (std::sqrt(gsq) < options.gradient_tolerance) break;
    for (std::size_t k = 0; k < dim; ++k) head.w[k] -= lr * g.grad_w[k];
    head.b -= lr * g.grad_b;
  }
  return head;
}

LogisticHead train_logistic_head(std::span<const EmbeddingRecord> records, std::span<const int> labels,
                                 const LogisticOptions& options) {
  std::vector<EmbeddingVector> x;
  x.reserve(records.size());
  for (const auto& r : records) x.push_back(r.vector);
  return train_logistic_head(x, labels, options);
}

// ---- head files ----

namespace {

void write_head(const std::string& path, const Container& c) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::kIo, "cannot write " + path);
  write_container(out, kHeadMagic, c);
}

Container read_head(const std::string& path, std::string_view kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIo, "cannot open " + path);
  auto c = read_container(in, kHeadMagic);
  for (const auto& r : c.records) {
    if (r.label != kind) throw Error(Errc::kMalformedRecord, path + ": expected a " + std::string(kind) + " head");
    if (!all_finite(r.values)) throw Error(Errc::kNonFinite, path + ": non-finite head parameter");
  }
  if (c.records.empty()) throw Error(Errc::kMalformedRecord, path + ": empty head file");
  return c;
}

std::vector<float> to_float(std::span<const double> v) { return {v.begin(), v.end()}; }

}  // namespace

void write_projection(const std::string& path, const ProjectionHead& head) {
  head.validate();
  Container c;
  c.dim = static_cast<std::uint32_t>(head.d_in);
  for (std::size_t r = 0; r < head.d_out; ++r) {
    c.records.push_back({"row" + std::to_string(r), "", "projection", "",
                         to_float(std::span<const double>(head.weights).subspan(r * head.d_in, head.d_in))});
  }
  write_head(path, c);
}

ProjectionHead read_projection(const std::string& path) {
  const auto c = read_head(path, "projection");
  ProjectionHead head{c.dim, c.records.size(), {}};
  head.weights.reserve(head.d_in * head.d_out);
  for (const auto& r : c.records) head.weights.insert(head.weights.end(), r.values.begin(), r.values.end());
  head.validate();
  return head;
}

void write_platt(const std::string& path, const PlattCalibrator& cal) {
  Container c;
  c.dim = 2;
  c.records.push_back({"platt", "", "platt", "", {static_cast<float>(cal.a), static_cast<float>(cal.b)}});
  write_head(path, c);
}

PlattCalibrator read_platt(const std::string& path) {
  const auto c = read_head(path, "platt");
  if (c.dim != 2 || c.records.size() != 1) throw Error(Errc::kMalformedRecord, path + ": malformed calibrator");
  return {c.records[0].values[0], c.records[0].values[1]};
}

void write_logistic(const std::string& path, const LogisticHead& head) {
  Container c;
  c.dim = static_cast<std::uint32_t>(head.w.size() + 1);
  auto values = to_float(head.w);
  values.push_back(static_cast<float>(head.b));
  c.records.push_back({"logistic", "", "logistic", "", std::move(values)});
  write_head(path, c);
}

LogisticHead read_logistic(const std::string& path) {
  const auto c = read_head(path, "logistic");
  if (c.dim < 2 || c.records.size() != 1) throw Error(Errc::kMalformedRecord, path + ": malformed logistic head");
  const auto& v = c.records[0].values;
  return {std::vector<double>(v.begin(), v.end() - 1), v.back()};
}

}  // namespace stylodet
