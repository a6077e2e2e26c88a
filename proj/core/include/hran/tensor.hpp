#pragma once
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "hran/errors.hpp"

namespace hran {

// Dense rank-4 shape (batch, channel, height, width).
struct Shape4 {
  int64_t n = 0, c = 0, h = 0, w = 0;

  int64_t numel() const { return n * c * h * w; }
  bool operator==(const Shape4&) const = default;

  std::string str() const {
    std::ostringstream os;
    os << n << "x" << c << "x" << h << "x" << w;
    return os.str();
  }
};

// Row-major rank-4 tensor. Scalar type is float for training, double for
// gradient checking.
template <typename T>
class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(Shape4 s) : shape_(s), data_(static_cast<size_t>(check_shape(s))) {}
  Tensor4(Shape4 s, std::vector<T> data) : shape_(s), data_(std::move(data)) {
    if (static_cast<int64_t>(data_.size()) != check_shape(s)) {
      throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                       " does not match shape " + s.str());
    }
  }

  static Tensor4 zeros(Shape4 s) { return Tensor4(s); }
  static Tensor4 full(Shape4 s, T v) {
    Tensor4 t(s);
    for (auto& x : t.data_) x = v;
    return t;
  }
  static Tensor4 scalar(T v) { return full({1, 1, 1, 1}, v); }

  const Shape4& shape() const { return shape_; }
  int64_t numel() const { return static_cast<int64_t>(data_.size()); }
  bool empty() const { return data_.empty(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::vector<T>& vec() { return data_; }
  const std::vector<T>& vec() const { return data_; }

  int64_t index(int64_t n, int64_t c, int64_t h, int64_t w) const {
    return ((n * shape_.c + c) * shape_.h + h) * shape_.w + w;
  }
  T& at(int64_t n, int64_t c, int64_t h, int64_t w) { return data_[index(n, c, h, w)]; }
  const T& at(int64_t n, int64_t c, int64_t h, int64_t w) const {
    return data_[index(n, c, h, w)];
  }
  T& operator[](int64_t i) { return data_[static_cast<size_t>(i)]; }
  const T& operator[](int64_t i) const { return data_[static_cast<size_t>(i)]; }

  bool all_finite() const {
    for (const T& v : data_) {
      if (!std::isfinite(static_cast<double>(v))) return false;
    }
    return true;
  }

  template <typename U>
  Tensor4<U> cast() const {
    Tensor4<U> out(shape_);
    for (int64_t i = 0; i < numel(); ++i) out[i] = static_cast<U>(data_[static_cast<size_t>(i)]);
    return out;
  }

  bool operator==(const Tensor4& o) const { return shape_ == o.shape_ && data_ == o.data_; }

 private:
  static int64_t check_shape(const Shape4& s) {
    if (s.n < 0 || s.c < 0 || s.h < 0 || s.w < 0) {
      throw ShapeError("negative tensor dimension in shape " + s.str());
    }
    return s.numel();
  }

  Shape4 shape_;
  std::vector<T> data_;
};

template <typename T>
void require_same_shape(const Tensor4<T>& a, const Tensor4<T>& b, const char* op) {
  if (!(a.shape() == b.shape())) {
    throw ShapeError(std::string(op) + ": shape mismatch " + a.shape().str() + " vs " +
                     b.shape().str());
  }
}

template <typename T>
void require_finite(const Tensor4<T>& t, const char* op) {
  if (!t.all_finite()) {
    throw NonFiniteError(std::string(op) + " produced or received non-finite values (shape " +
                         t.shape().str() + ")");
  }
}

}  // namespace hran
