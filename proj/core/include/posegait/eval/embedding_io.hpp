#pragma once

#include <string>

#include "posegait/embedding.hpp"

namespace posegait::eval {

/// Embedding exchange format "PGE1" (little-endian):
///   magic "PGE1", uint32 N, uint32 d,
///   N*d binary32 values row-major,
///   then N metadata records, each three length-prefixed strings
///   (uint16 len + bytes): subject label code as decimal string, view,
///   condition.
void write_embeddings(const EmbeddingSet& set, const std::string& path);
EmbeddingSet read_embeddings(const std::string& path);

}  // namespace posegait::eval
