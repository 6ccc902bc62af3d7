#pragma once

#include <cstddef>
#include <vector>

namespace posegait::model {

/// Dense N x C x T x V activation tensor (batch, channels, frames,
/// keypoints), n-major / v-innermost.
template <class T>
struct Tensor4 {
  int n = 0, c = 0, t = 0, v = 0;
  std::vector<T> data;

  Tensor4() = default;
  Tensor4(int n_, int c_, int t_, int v_)
      : n(n_), c(c_), t(t_), v(v_),
        data(static_cast<std::size_t>(n_) * c_ * t_ * v_, T(0)) {}

  std::size_t size() const { return data.size(); }
  std::size_t idx(int in, int ic, int it, int iv) const {
    return ((static_cast<std::size_t>(in) * c + ic) * t + it) * v + iv;
  }
  T& at(int in, int ic, int it, int iv) { return data[idx(in, ic, it, iv)]; }
  const T& at(int in, int ic, int it, int iv) const {
    return data[idx(in, ic, it, iv)];
  }

  bool same_shape(const Tensor4& o) const {
    return n == o.n && c == o.c && t == o.t && v == o.v;
  }
};

}  // namespace posegait::model
