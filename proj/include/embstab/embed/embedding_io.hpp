#pragma once

#include <cstring>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "embstab/embed/embedding.hpp"
#include "embstab/error.hpp"
#include "embstab/util/text.hpp"

namespace embstab {

enum class EmbeddingFormat { text, binary };

inline constexpr char kEmbeddingMagic[4] = {'E', 'M', 'B', '1'};

/// Text form: header "N d", then one "node_id v1 ... vd" line per node in id
/// order, values as lossless hex floats. Binary form: "EMB1" magic, u64 node
/// count, u64 dimension, then row-major little-endian f64 data.
inline void save_embedding(const Embedding& e, std::ostream& out,
                           EmbeddingFormat format) {
  const auto n = e.matrix.rows();
  const auto d = e.matrix.cols();
  if (format == EmbeddingFormat::binary) {
    out.write(kEmbeddingMagic, 4);
    const auto n64 = static_cast<std::uint64_t>(n);
    const auto d64 = static_cast<std::uint64_t>(d);
    out.write(reinterpret_cast<const char*>(&n64), 8);
    out.write(reinterpret_cast<const char*>(&d64), 8);
    out.write(reinterpret_cast<const char*>(e.matrix.data()),
              static_cast<std::streamsize>(sizeof(double)) * n * d);
  } else {
    out << n << ' ' << d << '\n';
    for (Index i = 0; i < n; ++i) {
      out << i;
      for (Index j = 0; j < d; ++j) out << ' ' << format_double_hex(e.matrix(i, j));
      out << '\n';
    }
  }
  if (!out) throw IoError("write failure while saving embedding");
}

namespace detail {

inline Embedding load_embedding_text(std::istream& in,
                                     std::optional<std::size_t> expected_nodes) {
  std::string line;
  std::size_t lineno = 0;
  auto next_body = [&](std::string_view& body) {
    while (std::getline(in, line)) {
      ++lineno;
      body = trim(line);
      if (!body.empty() && body.front() != '#') return true;
    }
    return false;
  };

  std::string_view body;
  if (!next_body(body)) throw ParseError("embedding file is empty");
  const auto header = split_fields(body);
  std::uint64_t n = 0, d = 0;
  if (header.size() != 2 || !parse_u64(header[0], n) || !parse_u64(header[1], d))
    throw ParseError("line " + std::to_string(lineno) +
                     ": expected header 'node_count dimension'");
  if (n == 0 || d == 0)
    throw ParseError("embedding header declares an empty matrix");
  if (expected_nodes && n != *expected_nodes)
    throw ParseError("embedding has " + std::to_string(n) + " rows, graph has " +
                     std::to_string(*expected_nodes) + " nodes");

  Embedding e;
  e.matrix.setZero(static_cast<Index>(n), static_cast<Index>(d));
  std::vector<std::uint8_t> filled(n, 0);
  std::size_t rows = 0;
  while (rows < n) {
    if (!next_body(body))
      throw ParseError("embedding file truncated: " + std::to_string(rows) + " of " +
                       std::to_string(n) + " rows present");
    const auto fields = split_fields(body);
    if (fields.size() != d + 1)
      throw ParseError("line " + std::to_string(lineno) + ": expected " +
                       std::to_string(d + 1) + " fields, got " +
                       std::to_string(fields.size()));
    std::uint64_t id = 0;
    if (!parse_u64(fields[0], id) || id >= n)
      throw ParseError("line " + std::to_string(lineno) + ": bad node id");
    if (filled[id])
      throw ParseError("line " + std::to_string(lineno) + ": duplicate row for node " +
                       std::to_string(id));
    filled[id] = 1;
    for (std::uint64_t j = 0; j < d; ++j) {
      double v = 0.0;
      if (!parse_double(fields[j + 1], v) || !std::isfinite(v))
        throw ParseError("line " + std::to_string(lineno) +
                         ": values must be finite numbers");
      e.matrix(static_cast<Index>(id), static_cast<Index>(j)) = v;
    }
    ++rows;
  }
  if (next_body(body))
    throw ParseError("line " + std::to_string(lineno) +
                     ": more rows than the header declares");
  return e;
}

inline Embedding load_embedding_binary(std::istream& in,
                                       std::optional<std::size_t> expected_nodes) {
  char magic[4];
  in.read(magic, 4);
  std::uint64_t n = 0, d = 0;
  in.read(reinterpret_cast<char*>(&n), 8);
  in.read(reinterpret_cast<char*>(&d), 8);
  if (!in) throw ParseError("embedding file truncated in header");
  if (n == 0 || d == 0) throw ParseError("embedding header declares an empty matrix");
  if (expected_nodes && n != *expected_nodes)
    throw ParseError("embedding has " + std::to_string(n) + " rows, graph has " +
                     std::to_string(*expected_nodes) + " nodes");
  constexpr std::uint64_t kMaxElements = (std::uint64_t{1} << 33);
  if (n > kMaxElements / std::max<std::uint64_t>(d, 1))
    throw ParseError("embedding header declares an implausibly large matrix");

  Embedding e;
  e.matrix.resize(static_cast<Index>(n), static_cast<Index>(d));
  in.read(reinterpret_cast<char*>(e.matrix.data()),
          static_cast<std::streamsize>(sizeof(double) * n * d));
  if (!in) throw ParseError("embedding file truncated: expected " +
                            std::to_string(n * d) + " values");
  char extra;
  if (in.read(&extra, 1))
    throw ParseError("embedding file has trailing bytes after the matrix");
  if (!all_finite(e.matrix))
    throw ParseError("embedding contains non-finite values");
  return e;
}

}  // namespace detail

/// Sniffs the format from the magic bytes. Loaded embeddings carry the
/// `external` algorithm tag unless the caller overrides it.
inline Embedding load_embedding(std::istream& in,
                                std::optional<std::size_t> expected_nodes = {}) {
  char magic[4] = {0, 0, 0, 0};
  in.read(magic, 4);
  if (!in && in.gcount() == 0) throw ParseError("embedding file is empty");
  in.clear();
  in.seekg(0);
  if (std::memcmp(magic, kEmbeddingMagic, 4) == 0)
    return detail::load_embedding_binary(in, expected_nodes);
  return detail::load_embedding_text(in, expected_nodes);
}

}  // namespace embstab
