#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace stylodet {

struct EmbeddingVector {
  std::vector<float> values;
  bool normalized = false;

  std::size_t dim() const { return values.size(); }
  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;
};

double l2_norm(std::span<const float> v);
double dot(std::span<const float> a, std::span<const float> b);

// Scales to unit L2 norm. Throws kDegenerateEpisode on a zero vector and
// kNonFinite on NaN/inf input.
EmbeddingVector normalized(std::vector<float> values);
EmbeddingVector normalized(std::span<const double> values);

bool all_finite(std::span<const float> v);

// Linear map applied on top of a base embedding: y = W x.
struct ProjectionHead {
  std::size_t d_in = 0;
  std::size_t d_out = 0;
  std::vector<double> weights;  // row-major, d_out x d_in

  double at(std::size_t row, std::size_t col) const { return weights[row * d_in + col]; }
  std::vector<double> apply(std::span<const float> x) const;
  // Throws unless sizes agree, d_out <= d_in, and all weights are finite.
  void validate() const;

  friend bool operator==(const ProjectionHead&, const ProjectionHead&) = default;
};

}  // namespace stylodet
