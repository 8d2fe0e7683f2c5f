#pragma once

#include <cassert>
#include <span>
#include <vector>

namespace alkit {

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), v_(static_cast<size_t>(rows) * cols, 0.0) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& at(int r, int c) { return v_[static_cast<size_t>(r) * cols_ + c]; }
  double at(int r, int c) const { return v_[static_cast<size_t>(r) * cols_ + c]; }

  std::span<double> row(int r) { return {v_.data() + static_cast<size_t>(r) * cols_, static_cast<size_t>(cols_)}; }
  std::span<const double> row(int r) const {
    return {v_.data() + static_cast<size_t>(r) * cols_, static_cast<size_t>(cols_)};
  }

  const std::vector<double>& data() const { return v_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> v_;
};

inline Matrix gather_rows(const Matrix& x, std::span<const int> rows) {
  Matrix out(static_cast<int>(rows.size()), x.cols());
  for (size_t i = 0; i < rows.size(); ++i) {
    auto src = x.row(rows[i]);
    auto dst = out.row(static_cast<int>(i));
    for (int c = 0; c < x.cols(); ++c) dst[c] = src[c];
  }
  return out;
}

template <typename T>
std::vector<T> gather(std::span<const T> values, std::span<const int> idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(values[i]);
  return out;
}

}  // namespace alkit
