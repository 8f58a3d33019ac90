#include "stylodet/common.hpp"

#include <cmath>
#include <numeric>

namespace stylodet {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::kInvalidArgument: return "invalid_argument";
    case Errc::kEmptyDocument: return "empty_document";
    case Errc::kMalformedRecord: return "malformed_record";
    case Errc::kDuplicateId: return "duplicate_id";
    case Errc::kSingleClass: return "single_class";
    case Errc::kDegenerateEpisode: return "degenerate_episode";
    case Errc::kBadMagic: return "bad_magic";
    case Errc::kUnsupportedVersion: return "unsupported_version";
    case Errc::kTruncatedFile: return "truncated_file";
    case Errc::kDimMismatch: return "dim_mismatch";
    case Errc::kNonFinite: return "non_finite";
    case Errc::kInsufficientData: return "insufficient_data";
    case Errc::kCompositionUnsatisfiable: return "composition_unsatisfiable";
    case Errc::kDivergence: return "divergence";
    case Errc::kMissingParaphrase: return "missing_paraphrase";
    case Errc::kIo: return "io";
  }
  return "unknown";
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t state = seed ^ (index * 0xD1B54A32D192ED03ULL);
  splitmix64_next(state);
  return splitmix64_next(state);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return derive_seed(derive_seed(seed, a), b);
}

std::uint64_t Rng::uniform_below(std::uint64_t bound) {
  if (bound == 0) throw Error(Errc::kInvalidArgument, "uniform_below: bound must be positive");
  // Rejection sampling keeps the result exactly uniform.
  const std::uint64_t limit = ~0ULL - (~0ULL % bound);
  std::uint64_t x = next_u64();
  while (x >= limit) x = next_u64();
  return x % bound;
}

double Rng::normal() {
  // Box-Muller; u1 is kept away from zero.
  const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::vector<std::size_t> Rng::sample_without_replacement(std::size_t n, std::size_t k) {
  if (k > n) throw Error(Errc::kInvalidArgument, "cannot sample more items than available");
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(uniform_below(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

std::string csv_field(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace stylodet
