#include "posegait/eval/embedding_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "posegait/error.hpp"

namespace posegait::eval {

namespace {

constexpr char kMagic[4] = {'P', 'G', 'E', '1'};

void put_str(std::ofstream& out, const std::string& s) {
  const std::uint16_t len = static_cast<std::uint16_t>(s.size());
  out.write(reinterpret_cast<const char*>(&len), 2);
  out.write(s.data(), len);
}

std::string get_str(std::ifstream& in) {
  std::uint16_t len = 0;
  in.read(reinterpret_cast<char*>(&len), 2);
  std::string s(len, '\0');
  if (len > 0) in.read(s.data(), len);
  if (!in) throw Error(errc::short_read, "embedding file truncated in metadata");
  return s;
}

}  // namespace

void write_embeddings(const EmbeddingSet& set, const std::string& path) {
  validate_embeddings(set);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(errc::io, "cannot open '" + path + "' for writing");
  out.write(kMagic, 4);
  const std::uint32_t n = static_cast<std::uint32_t>(set.size());
  const std::uint32_t d = static_cast<std::uint32_t>(set.dim());
  out.write(reinterpret_cast<const char*>(&n), 4);
  out.write(reinterpret_cast<const char*>(&d), 4);
  std::vector<float> buf(set.vectors.data.size());
  for (std::size_t i = 0; i < buf.size(); ++i)
    buf[i] = static_cast<float>(set.vectors.data[i]);
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
  for (int i = 0; i < set.size(); ++i) {
    put_str(out, std::to_string(set.labels[static_cast<std::size_t>(i)]));
    put_str(out, set.views.empty() ? "" : set.views[static_cast<std::size_t>(i)]);
    put_str(out, set.conditions.empty() ? ""
                                        : set.conditions[static_cast<std::size_t>(i)]);
  }
  if (!out) throw Error(errc::io, "write failed for '" + path + "'");
}

EmbeddingSet read_embeddings(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(errc::io, "cannot open '" + path + "'");
  char magic[4];
  in.read(magic, 4);
  if (in.gcount() != 4 || std::memcmp(magic, kMagic, 4) != 0)
    throw Error(errc::bad_magic, "'" + path + "' is not a PGE1 file");
  std::uint32_t n = 0, d = 0;
  in.read(reinterpret_cast<char*>(&n), 4);
  in.read(reinterpret_cast<char*>(&d), 4);
  if (!in) throw Error(errc::short_read, "embedding file truncated in header");
  std::vector<float> buf(static_cast<std::size_t>(n) * d);
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (static_cast<std::size_t>(in.gcount()) != buf.size() * sizeof(float))
    throw Error(errc::short_read, "short read, expected " +
                                      std::to_string(buf.size()) + " values");
  EmbeddingSet set;
  set.vectors = Matrix<double>(static_cast<int>(n), static_cast<int>(d));
  for (std::size_t i = 0; i < buf.size(); ++i)
    set.vectors.data[i] = static_cast<double>(buf[i]);
  for (std::uint32_t i = 0; i < n; ++i) {
    set.labels.push_back(std::stoi(get_str(in)));
    set.views.push_back(get_str(in));
    set.conditions.push_back(get_str(in));
  }
  return set;
}

}  // namespace posegait::eval
