#include "stylodet/store.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include "stylodet/common.hpp"

namespace stylodet {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::is_unsigned_v<T>);
  char bytes[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<char>((value >> (8 * i)) & 0xFF);
  out.write(bytes, sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  static_assert(std::is_unsigned_v<T>);
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw Error(Errc::kTruncatedFile, "truncated file");
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(bytes[i]) << (8 * i);
  return value;
}

void put_string(std::ostream& out, const std::string& s) {
  if (s.size() > std::numeric_limits<std::uint16_t>::max()) {
    throw Error(Errc::kInvalidArgument, "string field longer than 65535 bytes");
  }
  put_le(out, static_cast<std::uint16_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& in) {
  const auto len = get_le<std::uint16_t>(in);
  std::string s(len, '\0');
  if (len > 0 && !in.read(s.data(), len)) throw Error(Errc::kTruncatedFile, "truncated file");
  return s;
}

}  // namespace

void write_container(std::ostream& out, std::string_view magic, const Container& container) {
  out.write(magic.data(), static_cast<std::streamsize>(magic.size()));
  put_le(out, kStoreVersion);
  put_le(out, container.dim);
  put_le(out, static_cast<std::uint8_t>(container.normalized ? 1 : 0));
  put_le(out, static_cast<std::uint64_t>(container.records.size()));
  for (const auto& rec : container.records) {
    if (rec.values.size() != container.dim) {
      throw Error(Errc::kDimMismatch, "dim mismatch: record '" + rec.id + "' has " + std::to_string(rec.values.size()) +
                                          " values, store dim is " + std::to_string(container.dim));
    }
    put_string(out, rec.id);
    put_string(out, rec.author);
    put_string(out, rec.label);
    put_string(out, rec.domain);
    for (float v : rec.values) put_le(out, std::bit_cast<std::uint32_t>(v));
  }
  if (!out) throw Error(Errc::kIo, "write failed");
}

Container read_container(std::istream& in, std::string_view magic) {
  char got[4] = {};
  if (!in.read(got, 4)) throw Error(Errc::kTruncatedFile, "truncated file");
  if (std::string_view(got, 4) != magic) throw Error(Errc::kBadMagic, "bad magic");
  const auto version = get_le<std::uint32_t>(in);
  if (version != kStoreVersion) throw Error(Errc::kUnsupportedVersion, "unsupported version " + std::to_string(version));
  Container c;
  c.dim = get_le<std::uint32_t>(in);
  const auto flag = get_le<std::uint8_t>(in);
  if (flag > 1) throw Error(Errc::kMalformedRecord, "invalid normalized flag");
  c.normalized = flag == 1;
  const auto count = get_le<std::uint64_t>(in);
  for (std::uint64_t i = 0; i < count; ++i) {
    ContainerRecord rec;
    rec.id = get_string(in);
    rec.author = get_string(in);
    rec.label = get_string(in);
    rec.domain = get_string(in);
    rec.values.resize(c.dim);
    for (auto& v : rec.values) v = std::bit_cast<float>(get_le<std::uint32_t>(in));
    c.records.push_back(std::move(rec));
  }
  if (in.peek() != std::char_traits<char>::eof()) throw Error(Errc::kMalformedRecord, "trailing bytes after last record");
  return c;
}

void write_store(std::ostream& out, const std::vector<EmbeddingRecord>& records, std::uint32_t dim) {
  Container c;
  c.dim = records.empty() ? dim : static_cast<std::uint32_t>(records.front().vector.dim());
  c.normalized = !records.empty();
  for (const auto& r : records) {
    if (r.vector.dim() != c.dim) throw Error(Errc::kDimMismatch, "dim mismatch in record '" + r.id + "'");
    c.normalized = c.normalized && r.vector.normalized;
    c.records.push_back({r.id, r.author, r.source.label(), r.domain, r.vector.values});
  }
  write_container(out, kEmbeddingMagic, c);
}

void write_store(const std::string& path, const std::vector<EmbeddingRecord>& records, std::uint32_t dim) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::kIo, "cannot write " + path);
  write_store(out, records, dim);
}

EmbeddingStore read_store(std::istream& in) {
  auto c = read_container(in, kEmbeddingMagic);
  EmbeddingStore store;
  store.dim = c.dim;
  store.normalized = c.normalized;
  store.records.reserve(c.records.size());
  for (auto& rec : c.records) {
    EmbeddingRecord r;
    r.id = std::move(rec.id);
    r.author = std::move(rec.author);
    try {
      r.source = SourceLabel::parse(rec.label);
    } catch (const Error&) {
      throw Error(Errc::kMalformedRecord, "record '" + r.id + "' has an empty label");
    }
    r.domain = std::move(rec.domain);
    r.vector.values = std::move(rec.values);
    r.vector.normalized = c.normalized;
    store.records.push_back(std::move(r));
  }
  return store;
}

EmbeddingStore read_store(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIo, "cannot open " + path);
  return read_store(in);
}

std::vector<EmbeddingRecord> import_external(std::istream& in, std::optional<std::uint32_t> expected_dim) {
  auto store = read_store(in);
  if (expected_dim && store.dim != *expected_dim) {
    throw Error(Errc::kDimMismatch, "dim mismatch: store has " + std::to_string(store.dim) + ", expected " +
                                        std::to_string(*expected_dim));
  }
  if (store.dim == 0 && !store.records.empty()) throw Error(Errc::kDimMismatch, "store has zero dimension");
  for (auto& r : store.records) {
    if (!all_finite(r.vector.values)) throw Error(Errc::kNonFinite, "non-finite embedding in record '" + r.id + "'");
    if (!store.normalized) {
      try {
        r.vector = normalized(std::move(r.vector.values));
      } catch (const Error& e) {
        throw Error(e.code(), "record '" + r.id + "': zero vector cannot be normalized");
      }
    }
  }
  return std::move(store.records);
}

std::vector<EmbeddingRecord> import_external(const std::string& path, std::optional<std::uint32_t> expected_dim) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIo, "cannot open " + path);
  return import_external(in, expected_dim);
}

}  // namespace stylodet
