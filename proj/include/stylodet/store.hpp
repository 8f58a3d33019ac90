#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stylodet/corpus.hpp"
#include "stylodet/embedding.hpp"

namespace stylodet {

// Little-endian container:
//   magic[4] | version u32 (=1) | dim u32 | normalized u8 | count u64
//   count x { id, author, label, domain : u16 length + UTF-8 bytes ;
//             dim x f32 }
inline constexpr std::string_view kEmbeddingMagic = "STYL";
inline constexpr std::string_view kHeadMagic = "HEAD";
inline constexpr std::uint32_t kStoreVersion = 1;

struct ContainerRecord {
  std::string id;
  std::string author;
  std::string label;
  std::string domain;
  std::vector<float> values;

  friend bool operator==(const ContainerRecord&, const ContainerRecord&) = default;
};

struct Container {
  std::uint32_t dim = 0;
  bool normalized = false;
  std::vector<ContainerRecord> records;

  friend bool operator==(const Container&, const Container&) = default;
};

void write_container(std::ostream& out, std::string_view magic, const Container& container);
Container read_container(std::istream& in, std::string_view magic);

struct EmbeddingRecord {
  std::string id;
  std::string author;
  SourceLabel source;
  std::string domain;
  EmbeddingVector vector;

  friend bool operator==(const EmbeddingRecord&, const EmbeddingRecord&) = default;
};

struct EmbeddingStore {
  std::uint32_t dim = 0;
  bool normalized = false;
  std::vector<EmbeddingRecord> records;
};

// `dim` is only consulted when records is empty. The normalized flag is set
// when every record is flagged normalized.
void write_store(const std::string& path, const std::vector<EmbeddingRecord>& records, std::uint32_t dim = 0);
void write_store(std::ostream& out, const std::vector<EmbeddingRecord>& records, std::uint32_t dim = 0);
EmbeddingStore read_store(const std::string& path);
EmbeddingStore read_store(std::istream& in);

// Reads a store produced by an external encoder: checks values are finite,
// checks expected_dim, and normalizes vectors when the header flag is unset.
std::vector<EmbeddingRecord> import_external(const std::string& path, std::optional<std::uint32_t> expected_dim = {});
std::vector<EmbeddingRecord> import_external(std::istream& in, std::optional<std::uint32_t> expected_dim = {});

}  // namespace stylodet
