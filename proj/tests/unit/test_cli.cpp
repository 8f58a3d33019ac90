#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include <unistd.h>

#include <json.hpp>

#include "cli.hpp"
#include "stylodet/manifest.hpp"
#include "stylodet/store.hpp"
#include "stylodet/trainer.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace stylodet;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("stylodet_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  Result r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_corpus(const std::string& path, const std::vector<Document>& docs) {
  std::ofstream f(path);
  for (const auto& d : docs) {
    nlohmann::json j{{"id", d.id}, {"text", d.text}, {"author", d.author}, {"label", d.source.label()},
                     {"domain", d.domain}};
    f << j.dump() << '\n';
  }
}

void write_loose(const std::string& path, const std::vector<std::pair<std::string, std::string>>& docs) {
  std::ofstream f(path);
  for (const auto& [id, text] : docs) f << nlohmann::json{{"id", id}, {"text", text}}.dump() << '\n';
}

std::vector<Document> tiny_corpus() {
  testsupport::SyntheticOptions opt;
  opt.machine_authors = 2;
  opt.human_authors = 4;
  opt.docs_per_author = 12;
  opt.domains = {"news", "reviews"};
  opt.seed = 7;
  return testsupport::synthetic_corpus(opt);
}

// 6 authors x 2 domains x 12 docs.
struct Prepared {
  TempDir dir;
  std::string corpus = dir / "corpus.jsonl";
  std::string manifest = dir / "episodes.jsonl";
  Prepared(std::size_t n = 4) {
    write_corpus(corpus, tiny_corpus());
    const auto r = run_cli({"prepare", "--input", corpus, "--output", manifest, "-N", std::to_string(n), "--seed", "3"});
    REQUIRE(r.code == 0);
  }
};

}  // namespace

TEST_CASE("cli prepare groups documents into episodes and is reproducible") {
  Prepared p;
  const auto episodes = read_manifest_file(p.manifest);
  CHECK(episodes.size() == 6 * 2 * 3);
  for (const auto& ep : episodes) CHECK(ep.documents.size() == 4);

  const auto again = p.dir / "again.jsonl";
  REQUIRE(run_cli({"prepare", "--input", p.corpus, "--output", again, "-N", "4", "--seed", "3"}).code == 0);
  CHECK(slurp(again) == slurp(p.manifest));

  const auto r = run_cli({"prepare", "--input", p.corpus, "-N", "5", "--seed", "3"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  CHECK(read_manifest(in).size() == 6 * 2 * 2);
}

TEST_CASE("cli prepare honours the token limit") {
  Prepared p;
  const auto short_manifest = p.dir / "short.jsonl";
  REQUIRE(run_cli({"prepare", "--input", p.corpus, "--output", short_manifest, "-N", "4", "--max-tokens", "32"}).code == 0);
  const auto tokenizer = Tokenizer();
  for (const auto& ep : read_manifest_file(short_manifest)) {
    for (const auto& d : ep.documents) {
      CHECK(d.token_count <= 32);
      CHECK(tokenizer.count(d.text) <= 32);
    }
  }
}

TEST_CASE("cli embed writes a deterministic store matching the manifest") {
  Prepared p;
  const auto store1 = p.dir / "a.styl";
  const auto store2 = p.dir / "b.styl";
  REQUIRE(run_cli({"embed", "--episodes", p.manifest, "--output", store1, "--buckets", "256"}).code == 0);
  REQUIRE(run_cli({"embed", "--episodes", p.manifest, "--output", store2, "--buckets", "256"}).code == 0);
  CHECK(slurp(store1) == slurp(store2));
  const auto store = read_store(store1);
  const auto episodes = read_manifest_file(p.manifest);
  REQUIRE(store.records.size() == episodes.size());
  CHECK(store.dim == 256 + 512 + 16);
  for (std::size_t i = 0; i < episodes.size(); ++i) {
    CHECK(store.records[i].id == episodes[i].id);
    CHECK(store.records[i].source == episodes[i].source);
  }
}

TEST_CASE("cli eval single and multi reports, replay reproduces bytes") {
  Prepared p;
  const auto report = p.dir / "single.json";
  REQUIRE(run_cli({"eval", "--protocol", "single", "--episodes", p.manifest, "--buckets", "256", "--bootstrap", "20",
               "--seed", "5", "--output", report})
              .code == 0);
  const auto j = nlohmann::json::parse(slurp(report));
  CHECK(j.at("protocol") == "single");
  CHECK(j.contains("config"));
  bool saw_pauc = false;
  for (const auto& row : j.at("overall")) {
    if (row.at("metric") != "pauc") continue;
    saw_pauc = true;
    CHECK(row.at("mean").get<double>() >= 0.0);
    CHECK(row.at("mean").get<double>() <= 1.0);
  }
  CHECK(saw_pauc);

  const auto replayed = p.dir / "replayed.json";
  REQUIRE(run_cli({"eval", "--replay", report, "--output", replayed}).code == 0);
  CHECK(slurp(replayed) == slurp(report));

  const auto store = p.dir / "e.styl";
  REQUIRE(run_cli({"embed", "--episodes", p.manifest, "--output", store, "--buckets", "256"}).code == 0);
  const auto multi = run_cli({"eval", "--protocol", "multi", "--store", store, "--trials", "3", "--bootstrap", "10"});
  REQUIRE(multi.code == 0);
  CHECK(nlohmann::json::parse(multi.out).at("protocol") == "multi");

  const auto sweep = run_cli({"eval", "--protocol", "sweep", "--episodes", p.manifest, "--sweep-n", "1,2",
                          "--buckets", "256", "--bootstrap", "5"});
  REQUIRE(sweep.code == 0);
  CHECK(nlohmann::json::parse(sweep.out).at("reports").size() == 2);
}

TEST_CASE("cli eval score dump feeds calibrate") {
  Prepared p;
  const auto scores = p.dir / "scores.csv";
  const auto platt = p.dir / "platt.bin";
  REQUIRE(run_cli({"eval", "--protocol", "single", "--episodes", p.manifest, "--buckets", "256", "--bootstrap", "5",
               "--scores", scores, "--output", p.dir / "r.json"})
              .code == 0);
  CHECK(slurp(scores).rfind("query_id", 0) == 0);
  REQUIRE(run_cli({"calibrate", "--scores", scores, "--output", platt}).code == 0);
  CHECK(read_platt(platt).increasing());
}

TEST_CASE("cli detect scores queries against the support") {
  TempDir dir;
  const auto support = dir / "support.jsonl";
  const auto queries = dir / "queries.jsonl";
  write_loose(support, {{"s1", "The quick brown fox jumps over the lazy dog."}});
  write_loose(queries, {{"q1", "The quick brown fox jumps over the lazy dog."},
                        {"q2", "Completely unrelated words appear here, tonight!"},
                        {"q3", "The quick brown cat sleeps under the lazy dog."}});
  const auto r = run_cli({"detect", "--support", support, "--queries", queries});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "query_id,score");
  std::vector<double> scores;
  while (std::getline(in, line)) scores.push_back(std::stod(line.substr(line.find(',') + 1)));
  REQUIRE(scores.size() == 3);
  CHECK(scores[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(scores[2] > scores[1]);

  const auto flat = dir / "flat.platt";
  write_platt(flat, PlattCalibrator{0.0, 0.0});
  const auto c = run_cli({"detect", "--support", support, "--queries", queries, "--calibrator", flat});
  REQUIRE(c.code == 0);
  std::istringstream cin(c.out);
  std::getline(cin, line);
  CHECK(line == "query_id,score,probability");
  while (std::getline(cin, line)) CHECK(std::stod(line.substr(line.rfind(',') + 1)) == 0.5);

  const auto steep = dir / "steep.platt";
  write_platt(steep, PlattCalibrator{-4.0, 1.0});
  const auto s = run_cli({"detect", "--support", support, "--queries", queries, "--calibrator", steep});
  REQUIRE(s.code == 0);
  std::istringstream sin(s.out);
  std::getline(sin, line);
  std::vector<std::pair<double, double>> pairs;
  while (std::getline(sin, line)) {
    const auto a = line.find(',');
    const auto b = line.rfind(',');
    pairs.emplace_back(std::stod(line.substr(a + 1, b - a - 1)), std::stod(line.substr(b + 1)));
  }
  REQUIRE(pairs.size() == 3);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      if (pairs[i].first < pairs[k].first) CHECK(pairs[i].second < pairs[k].second);
    }
  }
}

TEST_CASE("cli train-projection then eval with the head") {
  Prepared p;
  const auto head = p.dir / "proj.head";
  const auto r = run_cli({"train-projection", "--episodes", p.manifest, "--output", head, "--steps", "5",
                      "--output-dim", "16", "--buckets", "256", "--batch-pairs", "4"});
  REQUIRE(r.code == 0);
  const auto e = run_cli({"eval", "--protocol", "single", "--episodes", p.manifest, "--buckets", "256", "--projection",
                      head, "--bootstrap", "5"});
  REQUIRE(e.code == 0);
  CHECK(nlohmann::json::parse(e.out).at("protocol") == "single");
}

TEST_CASE("cli train-head on a store") {
  Prepared p;
  const auto store = p.dir / "e.styl";
  REQUIRE(run_cli({"embed", "--episodes", p.manifest, "--output", store, "--buckets", "256"}).code == 0);
  const auto r = run_cli({"train-head", "--store", store, "--output", p.dir / "head.bin", "--max-iterations", "200"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("training accuracy", 0) == 0);
  CHECK(read_logistic(p.dir / "head.bin").w.size() == 256 + 512 + 16);
}

TEST_CASE("cli zeroshot with an n-gram model") {
  Prepared p;
  const auto r = run_cli({"zeroshot", "--episodes", p.manifest, "--lm-corpus", p.corpus, "--detector", "logrank",
                      "--order", "2", "--bootstrap", "5"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("protocol") == "zeroshot");
  CHECK(j.at("config").at("detector") == "logrank");
}

TEST_CASE("cli exit codes and error format") {
  CHECK(run_cli({}).code == 2);
  CHECK(run_cli({"frobnicate"}).code == 2);
  CHECK(run_cli({"prepare"}).code == 2);
  CHECK(run_cli({"eval", "--protocol", "bogus"}).code == 2);
  CHECK(run_cli({"--help"}).code == 0);

  TempDir dir;
  auto r = run_cli({"prepare", "--input", dir / "missing.jsonl"});
  CHECK(r.code == 1);
  CHECK(r.err.rfind("error[io]: ", 0) == 0);

  const auto bad = dir / "bad.jsonl";
  {
    std::ofstream f(bad);
    f << R"({"id":"a","text":"x.","author":"u","label":"human","domain":"d"})" << '\n'
      << R"({"id":"a","text":"y.","author":"u","label":"human","domain":"d"})" << '\n';
  }
  r = run_cli({"prepare", "--input", bad});
  CHECK(r.code == 1);
  CHECK(r.err.rfind("error[duplicate_id]: ", 0) == 0);

  const auto junk = dir / "junk.styl";
  {
    std::ofstream f(junk, std::ios::binary);
    f << "NOPE and then some bytes";
  }
  r = run_cli({"eval", "--store", junk});
  CHECK(r.code == 1);
  CHECK(r.err.rfind("error[bad_magic]: ", 0) == 0);

  r = run_cli({"eval", "--protocol", "single"});
  CHECK(r.code == 1);
  CHECK(r.err.rfind("error[invalid_argument]: ", 0) == 0);
}
