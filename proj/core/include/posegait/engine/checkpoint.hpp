#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "posegait/error.hpp"
#include "posegait/model/units.hpp"

namespace posegait::engine {

inline constexpr char kCheckpointMagic[4] = {'P', 'G', 'C', 'K'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Everything needed to resume training step-for-step: model parameters
/// (with a per-array shape manifest), optimizer moments, step counters,
/// RNG state and running loss statistics, plus the effective config text.
struct CheckpointState {
  std::string config_json;
  std::uint64_t step = 0;
  std::uint64_t optimizer_steps = 0;
  std::string rng_state;
  std::uint64_t loss_count = 0;
  double loss_sum = 0.0;
  double loss_last = 0.0;
};

namespace detail {

inline void put_bytes(std::ofstream& out, const void* p, std::size_t n) {
  out.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n));
}

inline void get_bytes(std::ifstream& in, void* p, std::size_t n) {
  in.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n)
    throw Error(errc::short_read, "checkpoint truncated");
}

inline void put_string(std::ofstream& out, const std::string& s) {
  const std::uint32_t len = static_cast<std::uint32_t>(s.size());
  put_bytes(out, &len, 4);
  put_bytes(out, s.data(), s.size());
}

inline std::string get_string(std::ifstream& in) {
  std::uint32_t len = 0;
  get_bytes(in, &len, 4);
  std::string s(len, '\0');
  if (len > 0) get_bytes(in, s.data(), len);
  return s;
}

}  // namespace detail

template <class T>
void save_checkpoint(const std::string& path, const CheckpointState& state,
                     std::vector<model::ParamRef<T>> params,
                     const std::vector<std::vector<T>>& m,
                     const std::vector<std::vector<T>>& v) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(errc::io, "cannot open checkpoint '" + path + "' for writing");
  detail::put_bytes(out, kCheckpointMagic, 4);
  detail::put_bytes(out, &kCheckpointVersion, 4);
  const std::uint8_t dtype = sizeof(T);
  detail::put_bytes(out, &dtype, 1);
  detail::put_bytes(out, &state.step, 8);
  detail::put_bytes(out, &state.optimizer_steps, 8);
  detail::put_string(out, state.config_json);
  detail::put_string(out, state.rng_state);
  detail::put_bytes(out, &state.loss_count, 8);
  detail::put_bytes(out, &state.loss_sum, 8);
  detail::put_bytes(out, &state.loss_last, 8);

  const std::uint32_t count = static_cast<std::uint32_t>(params.size());
  detail::put_bytes(out, &count, 4);
  for (const auto& p : params) {
    detail::put_string(out, p.name);
    const std::uint8_t ndim = static_cast<std::uint8_t>(p.shape.size());
    detail::put_bytes(out, &ndim, 1);
    for (int dim : p.shape) {
      const std::uint32_t d = static_cast<std::uint32_t>(dim);
      detail::put_bytes(out, &d, 4);
    }
    detail::put_bytes(out, p.value->data(), p.value->size() * sizeof(T));
  }
  const std::uint8_t has_moments = m.empty() ? 0 : 1;
  detail::put_bytes(out, &has_moments, 1);
  if (has_moments) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      detail::put_bytes(out, m[i].data(), m[i].size() * sizeof(T));
      detail::put_bytes(out, v[i].data(), v[i].size() * sizeof(T));
    }
  }
  if (!out) throw Error(errc::io, "write failed for checkpoint '" + path + "'");
}

/// Reads only the header fields (for inspecting a checkpoint without a
/// model). Validates magic/version/dtype.
template <class T>
CheckpointState read_checkpoint_header(std::ifstream& in, const std::string& path) {
  char magic[4];
  detail::get_bytes(in, magic, 4);
  if (std::memcmp(magic, kCheckpointMagic, 4) != 0)
    throw Error(errc::bad_magic, "'" + path + "' is not a checkpoint file");
  std::uint32_t version = 0;
  detail::get_bytes(in, &version, 4);
  if (version != kCheckpointVersion)
    throw Error(errc::version, "checkpoint version " + std::to_string(version) +
                                   " unsupported (expected " +
                                   std::to_string(kCheckpointVersion) + ")");
  std::uint8_t dtype = 0;
  detail::get_bytes(in, &dtype, 1);
  if (dtype != sizeof(T))
    throw Error(errc::version, "checkpoint dtype width " + std::to_string(dtype) +
                                   " does not match model dtype width " +
                                   std::to_string(sizeof(T)));
  CheckpointState state;
  detail::get_bytes(in, &state.step, 8);
  detail::get_bytes(in, &state.optimizer_steps, 8);
  state.config_json = detail::get_string(in);
  state.rng_state = detail::get_string(in);
  detail::get_bytes(in, &state.loss_count, 8);
  detail::get_bytes(in, &state.loss_sum, 8);
  detail::get_bytes(in, &state.loss_last, 8);
  return state;
}

template <class T>
CheckpointState load_checkpoint(const std::string& path,
                                std::vector<model::ParamRef<T>> params,
                                std::vector<std::vector<T>>* m,
                                std::vector<std::vector<T>>* v) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(errc::io, "cannot open checkpoint '" + path + "'");
  CheckpointState state = read_checkpoint_header<T>(in, path);

  std::uint32_t count = 0;
  detail::get_bytes(in, &count, 4);
  if (count != params.size())
    throw Error(errc::shape, "checkpoint holds " + std::to_string(count) +
                                 " arrays, model expects " +
                                 std::to_string(params.size()));
  for (auto& p : params) {
    const std::string name = detail::get_string(in);
    if (name != p.name)
      throw Error(errc::shape, "checkpoint array '" + name + "' does not match model '" +
                                   p.name + "'");
    std::uint8_t ndim = 0;
    detail::get_bytes(in, &ndim, 1);
    std::size_t elements = 1;
    for (int i = 0; i < ndim; ++i) {
      std::uint32_t d = 0;
      detail::get_bytes(in, &d, 4);
      if (i >= static_cast<int>(p.shape.size()) ||
          static_cast<int>(d) != p.shape[static_cast<std::size_t>(i)])
        throw Error(errc::shape, "shape mismatch for checkpoint array '" + name + "'");
      elements *= d;
    }
    if (elements != p.value->size())
      throw Error(errc::shape, "element count mismatch for '" + name + "'");
    detail::get_bytes(in, p.value->data(), elements * sizeof(T));
  }
  std::uint8_t has_moments = 0;
  detail::get_bytes(in, &has_moments, 1);
  if (has_moments && m && v) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      (*m)[i].resize(params[i].value->size());
      (*v)[i].resize(params[i].value->size());
      detail::get_bytes(in, (*m)[i].data(), (*m)[i].size() * sizeof(T));
      detail::get_bytes(in, (*v)[i].data(), (*v)[i].size() * sizeof(T));
    }
  }
  return state;
}

}  // namespace posegait::engine
