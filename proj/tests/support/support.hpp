#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stylodet/corpus.hpp"
#include "stylodet/kernels.hpp"
#include "stylodet/scoring.hpp"
#include "stylodet/zeroshot.hpp"

namespace testsupport {

// Authors with their own seeded word, punctuation and sentence-length habits.
// Machine authors are labelled "model-<k>" and write under that name.
struct SyntheticOptions {
  std::size_t machine_authors = 5;
  std::size_t human_authors = 15;
  std::size_t docs_per_author = 60;
  std::vector<std::string> domains = {"synth"};
  std::uint64_t seed = 1;
  double style_spread = 1.0;  // log-normal sigma of per-author word preferences
};

std::vector<stylodet::Document> synthetic_corpus(const SyntheticOptions& options);

// ROC metrics by direct counting at every threshold (O(n^2)), AUC by the
// Mann-Whitney pair count.
struct OracleMetrics {
  double pauc = 0.0;
  double auc_trapezoid = 0.0;
  double auc_pairs = 0.0;
  double fpr95 = 0.0;
};
OracleMetrics oracle_metrics(const std::vector<double>& scores, const std::vector<int>& labels, double max_fpr);

// Same distribution at every position; tokens are whitespace-separated
// vocabulary entries.
class FixedDistribution final : public stylodet::TokenLikelihoodProvider {
 public:
  FixedDistribution(std::vector<std::string> vocab, std::vector<double> probs);
  std::vector<stylodet::TokenStat> token_stats(const stylodet::Document& doc) const override;

 private:
  std::vector<std::string> vocab_;
  std::vector<double> probs_;
};

// Positives N(1.2, 0.4), negatives U(0, 1).
std::vector<stylodet::ScoreRecord> noisy_scores(std::uint64_t seed, std::size_t n_pos, std::size_t n_neg);

stylodet::EmbeddedEpisode make_episode(const std::string& id, const std::string& label, const std::string& domain,
                                       std::vector<float> v);

std::string data_path(const std::string& name);

struct GoldenCase {
  std::size_t limit = 0;
  std::string text;
  std::vector<std::size_t> boundaries;  // byte offsets just past each marked sentence
};
std::vector<GoldenCase> load_truncation_golden();

// Expected truncation from the hand marks, counting whitespace-separated
// tokens.
stylodet::Truncation oracle_truncation(const GoldenCase& c, std::size_t limit);

}  // namespace testsupport
