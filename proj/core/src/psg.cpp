#include "posegait/ingest/psg.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "posegait/error.hpp"

namespace posegait::ingest {

namespace {

static_assert(std::endian::native == std::endian::little,
              "PSG1 I/O assumes a little-endian host");

void put_u32(std::ofstream& out, std::uint32_t x) {
  out.write(reinterpret_cast<const char*>(&x), 4);
}

bool get_u32(std::ifstream& in, std::uint32_t& x) {
  in.read(reinterpret_cast<char*>(&x), 4);
  return in.gcount() == 4;
}

}  // namespace

void write_sequence(const SkeletonSequence& seq, const std::string& path) {
  if (seq.t < 1 || seq.v < 1 || seq.c < 1 ||
      seq.data.size() != static_cast<std::size_t>(seq.t) * seq.v * seq.c)
    throw Error(errc::shape, "write_sequence: inconsistent sequence shape");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(errc::io, "cannot open '" + path + "' for writing");
  out.write(kPsgMagic, 4);
  put_u32(out, static_cast<std::uint32_t>(seq.t));
  put_u32(out, static_cast<std::uint32_t>(seq.v));
  put_u32(out, static_cast<std::uint32_t>(seq.c));
  std::vector<float> buf(seq.data.size());
  for (std::size_t i = 0; i < seq.data.size(); ++i)
    buf[i] = static_cast<float>(seq.data[i]);
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!out) throw Error(errc::io, "write failed for '" + path + "'");
}

SkeletonSequence read_sequence(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(errc::io, "cannot open '" + path + "'");
  char magic[4];
  in.read(magic, 4);
  if (in.gcount() != 4 || std::memcmp(magic, kPsgMagic, 4) != 0)
    throw Error(errc::bad_magic, "'" + path + "' is not a PSG1 file");
  std::uint32_t t, v, c;
  if (!get_u32(in, t) || !get_u32(in, v) || !get_u32(in, c))
    throw Error(errc::short_read, "short read, expected 3 header values");
  const std::size_t count = static_cast<std::size_t>(t) * v * c;
  std::vector<float> buf(count);
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(count * sizeof(float)));
  const std::size_t got = static_cast<std::size_t>(in.gcount()) / sizeof(float);
  if (got != count)
    throw Error(errc::short_read, "short read, expected " + std::to_string(count) +
                                      " values, got " + std::to_string(got));
  SkeletonSequence seq;
  seq.t = static_cast<int>(t);
  seq.v = static_cast<int>(v);
  seq.c = static_cast<int>(c);
  seq.data.resize(count);
  for (std::size_t i = 0; i < count; ++i) seq.data[i] = static_cast<double>(buf[i]);
  return seq;
}

}  // namespace posegait::ingest
