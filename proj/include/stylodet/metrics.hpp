#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "stylodet/scoring.hpp"

namespace stylodet {

// Points of the empirical ROC curve from (0,0) to (1,1), one point per
// distinct score threshold taken in descending order. A score at or above
// the threshold predicts the positive (machine) class.
struct RocCurve {
  std::vector<double> fpr;
  std::vector<double> tpr;

  std::size_t size() const { return fpr.size(); }
  // Throws kInvalidArgument unless the curve is monotone with the right
  // endpoints.
  void validate() const;
};

RocCurve roc_curve(std::span<const ScoreRecord> records);
RocCurve roc_curve(std::span<const double> scores, std::span<const std::uint8_t> labels);

// Trapezoidal area over fpr in [0, max_fpr], interpolating linearly at
// max_fpr, standardized so that chance is 0.5 and perfect is 1.0
// (McClish). pauc(c, 1.0) returns auc(c) exactly.
double pauc(const RocCurve& curve, double max_fpr);
double auc(const RocCurve& curve);
// Smallest fpr on the interpolated curve with tpr >= target_tpr.
double fpr_at_tpr(const RocCurve& curve, double target_tpr = 0.95);

// Lower bound of the standardized pAUC at the given max_fpr (perfectly
// inverted ranking).
double pauc_floor(double max_fpr);

using CurveMetric = std::function<double(const RocCurve&)>;

struct BootstrapResult {
  double estimate = 0.0;  // metric on the original records
  double mean = 0.0;      // mean over resamples
  double se = 0.0;        // sample standard deviation over resamples
  std::size_t resamples = 0;

  friend bool operator==(const BootstrapResult&, const BootstrapResult&) = default;
};

struct BootstrapOptions {
  std::size_t resamples = 1000;
  std::uint64_t seed = 0;
  bool parallel = true;
  std::size_t max_redraws = 8;
};

// Stratified bootstrap: every resample draws n_pos positives and n_neg
// negatives with replacement from their own class, so class counts are
// preserved. Resample b uses the stream derive_seed(seed, b); a resample
// whose metric is not finite is redrawn from derive_seed(seed, b, attempt).
BootstrapResult bootstrap_se(std::span<const ScoreRecord> records, const CurveMetric& metric,
                             const BootstrapOptions& options);

// Several metrics evaluated on the same resamples.
std::vector<BootstrapResult> bootstrap_metrics(std::span<const ScoreRecord> records,
                                               std::span<const CurveMetric> metrics,
                                               const BootstrapOptions& options);

// Bootstrap standard error of the mean of `values` (resampling values).
double bootstrap_mean_se(std::span<const double> values, std::size_t resamples, std::uint64_t seed);

namespace reference {

// Straight-line serial implementation kept to check the parallel kernel.
std::vector<BootstrapResult> bootstrap_metrics_serial(std::span<const ScoreRecord> records,
                                                      std::span<const CurveMetric> metrics,
                                                      const BootstrapOptions& options);

}  // namespace reference

}  // namespace stylodet
