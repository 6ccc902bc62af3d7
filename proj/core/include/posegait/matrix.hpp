#pragma once

#include <cstddef>
#include <vector>

namespace posegait {

/// Dense row-major matrix. Deliberately minimal: the project needs a carrier
/// for adjacency matrices and embedding blocks, not a linear algebra library.
template <class T>
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<T> data;

  Matrix() = default;
  Matrix(int r, int c, T fill = T(0))
      : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {}

  T& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  const T& at(int r, int c) const {
    return data[static_cast<std::size_t>(r) * cols + c];
  }

  const T* row(int r) const { return data.data() + static_cast<std::size_t>(r) * cols; }
  T* row(int r) { return data.data() + static_cast<std::size_t>(r) * cols; }

  bool operator==(const Matrix&) const = default;
};

using MatD = Matrix<double>;
using MatF = Matrix<float>;

}  // namespace posegait
