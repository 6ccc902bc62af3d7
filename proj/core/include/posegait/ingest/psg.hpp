#pragma once

#include <string>

#include "posegait/sequence.hpp"

namespace posegait::ingest {

/// PSG1 sequence file format (little-endian throughout):
///   bytes 0..3   magic "PSG1"
///   bytes 4..15  uint32 T, uint32 V, uint32 C
///   then T*V*C IEEE-754 binary32 values, t-major, v-next, c-innermost.
/// Metadata (subject/condition/view/layout) lives in the index file, not
/// in the payload.
inline constexpr char kPsgMagic[4] = {'P', 'S', 'G', '1'};

/// Coordinates are rounded to binary32 on write; read(write(s)) == s holds
/// bit-exactly whenever s holds binary32-representable values (always true
/// for data that came in through this codec).
void write_sequence(const SkeletonSequence& seq, const std::string& path);

/// Throws Error("bad_magic") for non-PSG1 files and Error("short_read")
/// ("short read, expected N values") for truncated payloads.
SkeletonSequence read_sequence(const std::string& path);

}  // namespace posegait::ingest
