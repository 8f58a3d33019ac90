#include "stylodet/embedding.hpp"

#include <cmath>
#include <string>

#include "stylodet/common.hpp"

namespace stylodet {

double l2_norm(std::span<const float> v) { return std::sqrt(dot(v, v)); }

double dot(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) {
    throw Error(Errc::kDimMismatch, "dimension mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return acc;
}

bool all_finite(std::span<const float> v) {
  for (float x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

EmbeddingVector normalized(std::span<const double> values) {
  double sq = 0.0;
  for (double x : values) {
    if (!std::isfinite(x)) throw Error(Errc::kNonFinite, "non-finite embedding");
    sq += x * x;
  }
  if (sq == 0.0) throw Error(Errc::kDegenerateEpisode, "degenerate episode");
  const double inv = 1.0 / std::sqrt(sq);
  EmbeddingVector out;
  out.values.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out.values[i] = static_cast<float>(values[i] * inv);
  out.normalized = true;
  return out;
}

EmbeddingVector normalized(std::vector<float> values) {
  std::vector<double> wide(values.begin(), values.end());
  return normalized(std::span<const double>(wide));
}

std::vector<double> ProjectionHead::apply(std::span<const float> x) const {
  if (x.size() != d_in) {
    throw Error(Errc::kDimMismatch, "projection expects dim " + std::to_string(d_in) + ", got " + std::to_string(x.size()));
  }
  std::vector<double> y(d_out, 0.0);
  for (std::size_t r = 0; r < d_out; ++r) {
    const double* row = weights.data() + r * d_in;
    double acc = 0.0;
    for (std::size_t c = 0; c < d_in; ++c) acc += row[c] * static_cast<double>(x[c]);
    y[r] = acc;
  }
  return y;
}

void ProjectionHead::validate() const {
  if (d_in == 0 || d_out == 0) throw Error(Errc::kInvalidArgument, "projection head dimensions must be positive");
  if (d_out > d_in) throw Error(Errc::kInvalidArgument, "projection head must not increase dimension");
  if (weights.size() != d_in * d_out) throw Error(Errc::kDimMismatch, "projection weight count does not match shape");
  for (double w : weights) {
    if (!std::isfinite(w)) throw Error(Errc::kNonFinite, "non-finite projection weight");
  }
}

}  // namespace stylodet
