#include "stylodet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <string>

#include "stylodet/common.hpp"

namespace stylodet {

void RocCurve::validate() const {
  if (fpr.size() != tpr.size() || fpr.size() < 2) throw Error(Errc::kInvalidArgument, "ROC curve needs >= 2 points");
  if (fpr.front() != 0.0 || tpr.front() != 0.0 || fpr.back() != 1.0 || tpr.back() != 1.0) {
    throw Error(Errc::kInvalidArgument, "ROC curve must run from (0,0) to (1,1)");
  }
  for (std::size_t i = 1; i < fpr.size(); ++i) {
    if (fpr[i] < fpr[i - 1] || tpr[i] < tpr[i - 1]) throw Error(Errc::kInvalidArgument, "ROC curve is not monotone");
  }
}

RocCurve roc_curve(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) throw Error(Errc::kInvalidArgument, "scores and labels differ in length");
  std::size_t positives = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) throw Error(Errc::kNonFinite, "non-finite score");
    if (labels[i] > 1) throw Error(Errc::kInvalidArgument, "labels must be 0 or 1");
    positives += labels[i];
  }
  const std::size_t negatives = scores.size() - positives;
  if (positives == 0 || negatives == 0) throw Error(Errc::kSingleClass, "ROC curve requires both labels");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve curve;
  curve.fpr.push_back(0.0);
  curve.tpr.push_back(0.0);
  std::size_t tp = 0;
  std::size_t fp = 0;
  const double p = static_cast<double>(positives);
  const double n = static_cast<double>(negatives);
  for (std::size_t i = 0; i < order.size();) {
    const double threshold = scores[order[i]];
    for (; i < order.size() && scores[order[i]] == threshold; ++i) (labels[order[i]] ? tp : fp) += 1;
    curve.fpr.push_back(static_cast<double>(fp) / n);
    curve.tpr.push_back(static_cast<double>(tp) / p);
  }
  return curve;
}

RocCurve roc_curve(std::span<const ScoreRecord> records) {
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;
  scores.reserve(records.size());
  labels.reserve(records.size());
  for (const auto& r : records) {
    if (r.label != 0 && r.label != 1) throw Error(Errc::kInvalidArgument, "labels must be 0 or 1");
    scores.push_back(r.score);
    labels.push_back(static_cast<std::uint8_t>(r.label));
  }
  return roc_curve(scores, labels);
}

namespace {

double partial_area(const RocCurve& c, double max_fpr) {
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < c.size(); ++i) {
    const double x0 = c.fpr[i];
    const double x1 = c.fpr[i + 1];
    const double y0 = c.tpr[i];
    const double y1 = c.tpr[i + 1];
    if (x0 >= max_fpr) break;
    if (x1 <= max_fpr) {
      area += (x1 - x0) * (y0 + y1) * 0.5;
    } else {
      const double y_cut = y0 + (y1 - y0) * (max_fpr - x0) / (x1 - x0);
      area += (max_fpr - x0) * (y0 + y_cut) * 0.5;
      break;
    }
  }
  return area;
}

}  // namespace

double auc(const RocCurve& curve) { return partial_area(curve, 1.0); }

double pauc(const RocCurve& curve, double max_fpr) {
  if (!(max_fpr > 0.0 && max_fpr <= 1.0)) throw Error(Errc::kInvalidArgument, "max_fpr must lie in (0, 1]");
  if (max_fpr == 1.0) return auc(curve);
  const double raw = partial_area(curve, max_fpr);
  const double min_area = 0.5 * max_fpr * max_fpr;
  const double max_area = max_fpr;
  return 0.5 * (1.0 + (raw - min_area) / (max_area - min_area));
}

double pauc_floor(double max_fpr) {
  if (max_fpr == 1.0) return 0.0;
  const double min_area = 0.5 * max_fpr * max_fpr;
  return 0.5 * (1.0 - min_area / (max_fpr - min_area));
}

double fpr_at_tpr(const RocCurve& curve, double target_tpr) {
  if (curve.tpr.front() >= target_tpr) return curve.fpr.front();
  for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
    const double t0 = curve.tpr[i];
    const double t1 = curve.tpr[i + 1];
    if (t1 >= target_tpr && t0 < target_tpr) {
      const double f0 = curve.fpr[i];
      const double f1 = curve.fpr[i + 1];
      return f0 + (f1 - f0) * (target_tpr - t0) / (t1 - t0);
    }
  }
  return 1.0;
}

// ---- bootstrap ----

namespace {

struct Strata {
  std::vector<double> positives;
  std::vector<double> negatives;
};

Strata split(std::span<const ScoreRecord> records) {
  Strata s;
  for (const auto& r : records) (r.label == 1 ? s.positives : s.negatives).push_back(r.score);
  if (s.positives.empty() || s.negatives.empty()) throw Error(Errc::kSingleClass, "bootstrap requires both labels");
  return s;
}

// One stratified resample's metric values; empty when every redraw failed.
std::vector<double> resample_metrics(const Strata& strata, std::span<const CurveMetric> metrics,
                                     const BootstrapOptions& options, std::size_t b) {
  const std::size_t np = strata.positives.size();
  const std::size_t nn = strata.negatives.size();
  std::vector<double> scores(np + nn);
  std::vector<std::uint8_t> labels(np + nn, 0);
  std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(np), 1);
  for (std::size_t attempt = 0; attempt <= options.max_redraws; ++attempt) {
    Rng rng(attempt == 0 ? derive_seed(options.seed, b) : derive_seed(options.seed, b, attempt));
    for (std::size_t i = 0; i < np; ++i) scores[i] = strata.positives[rng.uniform_below(np)];
    for (std::size_t i = 0; i < nn; ++i) scores[np + i] = strata.negatives[rng.uniform_below(nn)];
    std::vector<double> values;
    values.reserve(metrics.size());
    try {
      const auto curve = roc_curve(scores, labels);
      for (const auto& m : metrics) values.push_back(m(curve));
    } catch (const Error&) {
      continue;
    }
    if (std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); })) return values;
  }
  return {};
}

// n-1 denominator; exactly zero for a constant sample.
double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2 || std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); })) return 0.0;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double sq = 0.0;
  for (double x : v) sq += (x - mean) * (x - mean);
  return std::sqrt(sq / static_cast<double>(v.size() - 1));
}

std::vector<BootstrapResult> summarize(std::span<const ScoreRecord> records, std::span<const CurveMetric> metrics,
                                       const std::vector<std::vector<double>>& draws) {
  const auto curve = roc_curve(records);
  std::vector<BootstrapResult> out(metrics.size());
  const auto B = static_cast<double>(draws.size());
  for (std::size_t m = 0; m < metrics.size(); ++m) {
    out[m].estimate = metrics[m](curve);
    out[m].resamples = draws.size();
    std::vector<double> column;
    column.reserve(draws.size());
    for (const auto& d : draws) column.push_back(d[m]);
    out[m].mean = std::accumulate(column.begin(), column.end(), 0.0) / B;
    out[m].se = sample_sd(column);
  }
  return out;
}

void check_options(const BootstrapOptions& options) {
  if (options.resamples < 2) throw Error(Errc::kInvalidArgument, "bootstrap needs at least 2 resamples");
}

}  // namespace

std::vector<BootstrapResult> bootstrap_metrics(std::span<const ScoreRecord> records,
                                               std::span<const CurveMetric> metrics,
                                               const BootstrapOptions& options) {
  check_options(options);
  const auto strata = split(records);
  std::vector<std::vector<double>> draws(options.resamples);
  const auto B = static_cast<std::ptrdiff_t>(options.resamples);
#pragma omp parallel for schedule(static) if (options.parallel)
  for (std::ptrdiff_t b = 0; b < B; ++b) {
    draws[b] = resample_metrics(strata, metrics, options, static_cast<std::size_t>(b));
  }
  for (const auto& d : draws) {
    if (d.empty()) throw Error(Errc::kInsufficientData, "bootstrap: resample metric undefined after redraws");
  }
  return summarize(records, metrics, draws);
}

BootstrapResult bootstrap_se(std::span<const ScoreRecord> records, const CurveMetric& metric,
                             const BootstrapOptions& options) {
  return bootstrap_metrics(records, std::span<const CurveMetric>(&metric, 1), options).front();
}

double bootstrap_mean_se(std::span<const double> values, std::size_t resamples, std::uint64_t seed) {
  if (values.empty()) throw Error(Errc::kInsufficientData, "bootstrap of an empty sample");
  if (values.size() == 1 || resamples < 2) return 0.0;
  std::vector<double> means(resamples);
  for (std::size_t b = 0; b < resamples; ++b) {
    Rng rng(derive_seed(seed, b));
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) sum += values[rng.uniform_below(values.size())];
    means[b] = sum / static_cast<double>(values.size());
  }
  return sample_sd(means);
}

namespace reference {

std::vector<BootstrapResult> bootstrap_metrics_serial(std::span<const ScoreRecord> records,
                                                      std::span<const CurveMetric> metrics,
                                                      const BootstrapOptions& options) {
  check_options(options);
  const auto strata = split(records);
  std::vector<std::vector<double>> draws;
  draws.reserve(options.resamples);
  for (std::size_t b = 0; b < options.resamples; ++b) {
    auto d = resample_metrics(strata, metrics, options, b);
    if (d.empty()) throw Error(Errc::kInsufficientData, "bootstrap: resample metric undefined after redraws");
    draws.push_back(std::move(d));
  }
  return summarize(records, metrics, draws);
}

}  // namespace reference

}  // namespace stylodet
