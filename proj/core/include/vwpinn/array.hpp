#pragma once

#include <cassert>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace vwpinn {

/// Dense row-major matrix of doubles. Scalars are 1x1.
class Array {
 public:
  Array() = default;
  Array(int rows, int cols)
      : rows_(rows), cols_(cols),
        data_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0.0) {
    assert(rows >= 0 && cols >= 0);
  }

  static Array scalar(double v) {
    Array a(1, 1);
    a.data_[0] = v;
    return a;
  }
  static Array full(int rows, int cols, double v) {
    Array a(rows, cols);
    for (auto& x : a.data_) x = v;
    return a;
  }
  static Array from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const int r = static_cast<int>(rows.size());
    const int c = r > 0 ? static_cast<int>(rows.begin()->size()) : 0;
    Array a(r, c);
    int i = 0;
    for (const auto& row : rows) {
      assert(static_cast<int>(row.size()) == c);
      int j = 0;
      for (double v : row) a(i, j++) = v;
      ++i;
    }
    return a;
  }
  /// n x 1 column from a flat sequence.
  static Array column(const std::vector<double>& v) {
    Array a(static_cast<int>(v.size()), 1);
    a.data_ = v;
    return a;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool is_scalar() const { return rows_ == 1 && cols_ == 1; }
  bool same_shape(const Array& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

  double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  const std::vector<double>& vec() const { return data_; }

  double scalar_value() const {
    assert(is_scalar());
    return data_[0];
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

}  // namespace vwpinn
