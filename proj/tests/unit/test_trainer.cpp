#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>

#include "stylodet/common.hpp"
#include "stylodet/embedding.hpp"
#include "stylodet/trainer.hpp"

using namespace stylodet;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::kIo;
}

Episode episode(const std::string& id, const std::string& author, bool machine, const std::string& domain = "d",
                std::optional<std::int64_t> t = {}) {
  Episode e;
  e.id = id;
  e.author = author;
  e.source = machine ? SourceLabel::machine(author) : SourceLabel::human();
  e.domain = domain;
  Document d;
  d.id = id + "/0";
  d.text = "x.";
  d.author = author;
  d.source = e.source;
  d.domain = domain;
  d.timestamp = t;
  e.documents = {d};
  return e;
}

std::vector<double> random_unit(Rng& rng, std::size_t dim) {
  std::vector<double> v(dim);
  double sq = 0;
  for (auto& x : v) {
    x = rng.normal();
    sq += x * x;
  }
  for (auto& x : v) x /= std::sqrt(sq);
  return v;
}

double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  const double scale = std::max(std::sqrt(na), std::sqrt(nb));
  return scale == 0 ? 0 : std::sqrt(diff) / scale;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("stylodet_unit_" + name)).string();
}

}  // namespace

TEST_CASE("batches hold one pair per distinct author") {
  std::vector<Episode> eps;
  for (int a = 0; a < 4; ++a) {
    for (int k = 0; k < 2; ++k) eps.push_back(episode("a" + std::to_string(a) + "e" + std::to_string(k), "a" + std::to_string(a), false));
  }
  ContrastiveConfig cfg;
  cfg.batch_pairs = 4;
  Rng rng(1);
  const auto batch = sample_contrastive_batch(eps, cfg, rng);
  REQUIRE(batch.size() == 4);
  std::set<std::string> authors;
  for (const auto& p : batch) {
    CHECK(p.anchor != p.positive);
    CHECK(eps[p.anchor].author == eps[p.positive].author);
    authors.insert(eps[p.anchor].author);
  }
  CHECK(authors.size() == 4);

  Rng r1(42), r2(42);
  CHECK(sample_contrastive_batch(eps, cfg, r1) == sample_contrastive_batch(eps, cfg, r2));

  cfg.batch_pairs = 5;
  CHECK(code_of([&] { sample_contrastive_batch(eps, cfg, rng); }) == Errc::kInsufficientData);
}

TEST_CASE("half human half machine composition") {
  std::vector<Episode> eps;
  for (int a = 0; a < 4; ++a) {
    const bool machine = a == 3;
    for (int k = 0; k < 2; ++k) eps.push_back(episode("e" + std::to_string(a) + std::to_string(k), "a" + std::to_string(a), machine));
  }
  ContrastiveConfig cfg;
  cfg.batch_pairs = 4;
  cfg.batch_composition = BatchComposition::kHalfHumanHalfMachine;
  Rng rng(3);
  try {
    sample_contrastive_batch(eps, cfg, rng);
    FAIL("unsatisfiable composition accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kCompositionUnsatisfiable);
    CHECK(std::string(e.what()).find("composition unsatisfiable") == 0);
  }

  for (int a = 4; a < 6; ++a) {
    for (int k = 0; k < 2; ++k) eps.push_back(episode("e" + std::to_string(a) + std::to_string(k), "m" + std::to_string(a), true));
  }
  for (int trial = 0; trial < 20; ++trial) {
    const auto batch = sample_contrastive_batch(eps, cfg, rng);
    int machines = 0;
    for (const auto& p : batch) machines += eps[p.anchor].source.is_machine();
    CHECK(machines == 2);
  }
}

TEST_CASE("all-domains composition covers every domain") {
  std::vector<Episode> eps;
  const char* domains[] = {"news", "reddit", "reviews"};
  for (int a = 0; a < 9; ++a) {
    const std::string dom = domains[a % 3];
    for (int k = 0; k < 2; ++k) eps.push_back(episode("e" + std::to_string(a) + std::to_string(k), "a" + std::to_string(a), a % 2, dom));
  }
  ContrastiveConfig cfg;
  cfg.batch_pairs = 4;
  cfg.batch_composition = BatchComposition::kAllDomainsPresent;
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto batch = sample_contrastive_batch(eps, cfg, rng);
    std::set<std::string> seen;
    for (const auto& p : batch) seen.insert(eps[p.anchor].domain);
    CHECK(seen.size() == 3);
  }
  cfg.batch_pairs = 2;
  CHECK(code_of([&] { sample_contrastive_batch(eps, cfg, rng); }) == Errc::kCompositionUnsatisfiable);
}

TEST_CASE("timestamped episodes pair only across disjoint time ranges") {
  std::vector<Episode> eps = {episode("a1", "a", false, "d", 10), episode("a2", "a", false, "d", 10),
                              episode("a3", "a", false, "d", 20), episode("b1", "b", false, "d", 5),
                              episode("b2", "b", false, "d", 5)};
  ContrastiveConfig cfg;
  cfg.batch_pairs = 2;
  Rng rng(1);
  // author b has no usable pair
  CHECK(code_of([&] { sample_contrastive_batch(eps, cfg, rng); }) == Errc::kInsufficientData);
  eps.push_back(episode("b3", "b", false, "d", 6));
  for (int t = 0; t < 30; ++t) {
    for (const auto& p : sample_contrastive_batch(eps, cfg, rng)) {
      CHECK(eps[p.anchor].documents[0].timestamp != eps[p.positive].documents[0].timestamp);
    }
  }
}

TEST_CASE("InfoNCE equals ln M when all similarities tie") {
  for (std::size_t m : {2u, 5u}) {
    std::vector<std::vector<double>> a(m, {1.0, 0.0, 0.0}), p(m, {2.0, 0.0, 0.0});
    const auto r = info_nce_loss(a, p, 0.1);
    CHECK(r.loss == doctest::Approx(std::log(static_cast<double>(m))).epsilon(1e-12));
  }
  std::vector<std::vector<double>> a = {{1, 0}, {0, 1}}, p = {{1, 0}, {0, 1}};
  CHECK(info_nce_loss(a, p, 0.1).loss >= 0.0);
  CHECK(code_of([&] { info_nce_loss(a, p, 0.0); }) == Errc::kInvalidArgument);
  CHECK(code_of([&] { info_nce_loss(a, p, -1.0); }) == Errc::kInvalidArgument);
  std::vector<std::vector<double>> one = {{1, 0}};
  CHECK(code_of([&] { info_nce_loss(one, one, 0.1); }) == Errc::kInvalidArgument);
}

TEST_CASE("InfoNCE gradients match central differences") {
  Rng rng(2024);
  const double eps = 1e-4;
  for (int inst = 0; inst < 50; ++inst) {
    const std::size_t m = 2 + rng.uniform_below(5), dim = 3 + rng.uniform_below(6);
    const double tau = 0.05 + rng.uniform01();
    std::vector<std::vector<double>> a, p;
    for (std::size_t i = 0; i < m; ++i) {
      a.push_back(random_unit(rng, dim));
      p.push_back(random_unit(rng, dim));
    }
    const auto r = info_nce_loss(a, p, tau);
    std::vector<double> analytic, numeric;
    for (int side = 0; side < 2; ++side) {
      auto& x = side == 0 ? a : p;
      const auto& g = side == 0 ? r.anchor_grads : r.positive_grads;
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t k = 0; k < dim; ++k) {
          const double keep = x[i][k];
          x[i][k] = keep + eps;
          const double up = info_nce_loss(a, p, tau).loss;
          x[i][k] = keep - eps;
          const double down = info_nce_loss(a, p, tau).loss;
          x[i][k] = keep;
          analytic.push_back(g[i][k]);
          numeric.push_back((up - down) / (2 * eps));
        }
      }
    }
    CHECK(relative_error(analytic, numeric) < 1e-4);
  }
}

TEST_CASE("logistic gradients match central differences") {
  Rng rng(77);
  const double eps = 1e-4;
  for (int inst = 0; inst < 50; ++inst) {
    const std::size_t n = 3 + rng.uniform_below(10), dim = 2 + rng.uniform_below(6);
    std::vector<EmbeddingVector> x;
    std::vector<int> y;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<float> v(dim);
      for (auto& c : v) c = static_cast<float>(rng.normal());
      x.push_back({v, false});
      y.push_back(static_cast<int>(rng.uniform_below(2)));
    }
    LogisticHead h;
    for (std::size_t k = 0; k < dim; ++k) h.w.push_back(rng.normal());
    h.b = rng.normal();
    const double l2 = rng.uniform01() * 0.1;
    const auto g = logistic_loss(h, x, y, l2);
    std::vector<double> analytic = g.grad_w, numeric;
    analytic.push_back(g.grad_b);
    for (std::size_t k = 0; k <= dim; ++k) {
      double& param = k < dim ? h.w[k] : h.b;
      const double keep = param;
      param = keep + eps;
      const double up = logistic_loss(h, x, y, l2).loss;
      param = keep - eps;
      const double down = logistic_loss(h, x, y, l2).loss;
      param = keep;
      numeric.push_back((up - down) / (2 * eps));
    }
    CHECK(relative_error(analytic, numeric) < 1e-4);
  }
}

namespace {

// 8 authors, 4 episodes each; author k's signature is coordinate k plus noise.
struct ToyCorpus {
  std::vector<Episode> episodes;
  std::vector<EmbeddingVector> base;
};

ToyCorpus toy_corpus() {
  ToyCorpus t;
  Rng rng(9);
  for (int a = 0; a < 8; ++a) {
    for (int k = 0; k < 4; ++k) {
      t.episodes.push_back(episode("a" + std::to_string(a) + "e" + std::to_string(k), "a" + std::to_string(a), a < 3));
      std::vector<float> v(16);
      for (auto& c : v) c = static_cast<float>(0.3 * rng.normal());
      v[a] += 1.0f;
      t.base.push_back(normalized(std::move(v)));
    }
  }
  return t;
}

}  // namespace

TEST_CASE("projection training lowers the contrastive loss") {
  const auto toy = toy_corpus();
  ContrastiveConfig cfg;
  cfg.batch_pairs = 8;
  cfg.steps = 60;
  cfg.output_dim = 8;
  cfg.learning_rate = 0.2;
  cfg.seed = 4;
  const auto trained = train_projection(toy.episodes, toy.base, cfg);
  CHECK(trained.log.size() == 60);
  CHECK(trained.head.d_out == 8);
  CHECK(trained.head.d_in == 16);

  std::vector<ContrastivePair> fixed;
  for (std::size_t a = 0; a < 8; ++a) fixed.push_back({a * 4, a * 4 + 1});
  const auto init = init_projection(16, 8, cfg.seed);
  const double before = projection_loss(init, toy.base, fixed, cfg.temperature);
  const double after = projection_loss(trained.head, toy.base, fixed, cfg.temperature);
  CHECK(after < before);
  CHECK(trained.log.back().loss < trained.log.front().loss);

  const auto again = train_projection(toy.episodes, toy.base, cfg);
  CHECK(again.head == trained.head);

  cfg.steps = 0;
  const auto untouched = train_projection(toy.episodes, toy.base, cfg);
  CHECK(untouched.head == init);
  CHECK(untouched.log.empty());

  std::ostringstream log;
  write_train_log(log, trained.log);
  CHECK(log.str().rfind("{\"step\":0,\"loss\":", 0) == 0);
}

TEST_CASE("projection training reports divergence with the step") {
  const auto toy = toy_corpus();
  ContrastiveConfig cfg;
  cfg.batch_pairs = 4;
  cfg.steps = 200;
  cfg.output_dim = 8;
  cfg.learning_rate = 1e300;
  try {
    train_projection(toy.episodes, toy.base, cfg);
    FAIL("expected divergence");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kDivergence);
    CHECK(std::string(e.what()).find("step") != std::string::npos);
  }
}

TEST_CASE("Platt scaling examples") {
  CHECK(apply_platt({-1.0, 0.0}, std::log(3.0)) == doctest::Approx(0.75).epsilon(1e-12));
  for (double s : {-5.0, 0.0, 3.5}) CHECK(apply_platt({0.0, 0.0}, s) == 0.5);

  std::vector<double> scores;
  std::vector<int> labels;
  for (int i = 0; i < 50; ++i) {
    scores.push_back(-1.0);
    labels.push_back(0);
    scores.push_back(1.0);
    labels.push_back(1);
  }
  const auto cal = fit_platt(scores, labels);
  CHECK(cal.a < 0.0);
  CHECK(cal.increasing());
  double prev = 0.0;
  for (double s = -3; s <= 3; s += 0.25) {
    const double p = apply_platt(cal, s);
    CHECK(p > prev);
    prev = p;
  }

  std::vector<double> flat(100, 0.3);
  std::vector<int> prior_labels(100, 0);
  for (int i = 0; i < 30; ++i) prior_labels[i] = 1;
  const auto flat_cal = fit_platt(flat, prior_labels);
  CHECK(std::abs(apply_platt(flat_cal, 0.3) - 0.3) < 1e-3);

  std::vector<int> single(100, 1);
  CHECK(code_of([&] { fit_platt(flat, single); }) == Errc::kSingleClass);
}

TEST_CASE("Platt fit reaches a stationary point of the smoothed likelihood") {
  Rng rng(8);
  std::vector<double> s;
  std::vector<int> y;
  for (int i = 0; i < 200; ++i) {
    const int label = static_cast<int>(rng.uniform_below(2));
    s.push_back(rng.normal() + 1.5 * label);
    y.push_back(label);
  }
  const auto cal = fit_platt(s, y);
  double np = 0, nn = 0;
  for (int l : y) (l ? np : nn) += 1;
  const double tp = (np + 1) / (np + 2), tn = 1 / (nn + 2);
  double ga = 0, gb = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double t = y[i] ? tp : tn;
    const double p = apply_platt(cal, s[i]);
    // d/dA of -sum [t log p + (1-t) log(1-p)] with p = 1/(1+exp(A s + B))
    ga += (t - p) * s[i];
    gb += (t - p);
  }
  CHECK(std::abs(ga) < 1e-8);
  CHECK(std::abs(gb) < 1e-8);
}

TEST_CASE("logistic head fits separable data and the prior without signal") {
  Rng rng(21);
  std::vector<EmbeddingVector> x;
  std::vector<int> y;
  for (int i = 0; i < 60; ++i) {
    const int label = i % 2;
    const float c = label ? 2.0f : -2.0f;
    x.push_back({{c + static_cast<float>(0.5 * rng.normal()), c + static_cast<float>(0.5 * rng.normal())}, false});
    y.push_back(label);
  }
  LogisticOptions opts;
  const auto head = train_logistic_head(x, y, opts);
  int correct = 0;
  for (std::size_t i = 0; i < x.size(); ++i) correct += (head.probability(x[i].values) > 0.5) == (y[i] == 1);
  CHECK(correct == 60);
  CHECK(train_logistic_head(x, y, opts) == head);

  std::vector<EmbeddingVector> zeros(40, EmbeddingVector{{0.0f, 0.0f, 0.0f}, false});
  std::vector<int> prior(40, 0);
  for (int i = 0; i < 10; ++i) prior[i] = 1;
  const auto flat = train_logistic_head(zeros, prior, opts);
  CHECK(flat.probability(zeros[0].values) == doctest::Approx(0.25).epsilon(1e-6));

  std::vector<int> single(40, 0);
  CHECK(code_of([&] { train_logistic_head(zeros, single, opts); }) == Errc::kSingleClass);
}

TEST_CASE("head files round-trip through the HEAD container") {
  ProjectionHead proj{3, 2, {0.5, -0.25, 1.0, 2.0, 0.125, -4.0}};
  const auto pp = temp_path("proj.head");
  write_projection(pp, proj);
  CHECK(read_projection(pp) == proj);

  const PlattCalibrator cal{-1.5, 0.25};
  const auto cp = temp_path("platt.head");
  write_platt(cp, cal);
  CHECK(read_platt(cp) == cal);
  CHECK(code_of([&] { read_projection(cp); }) == Errc::kMalformedRecord);

  LogisticHead lh{{0.5, -1.0}, 0.75};
  const auto lp = temp_path("logistic.head");
  write_logistic(lp, lh);
  CHECK(read_logistic(lp) == lh);
  CHECK(code_of([&] { read_platt(lp); }) == Errc::kMalformedRecord);

  for (const auto& p : {pp, cp, lp}) std::filesystem::remove(p);
}
