#pragma once
#include <cmath>

#include "hran/layers.hpp"
#include "hran/rng.hpp"
#include "hran/tensor.hpp"

namespace test_helpers {

// Zeroes every effective kernel (gains, biases) and every attention weight,
// keeping raw directions nonzero so weight_norm stays well defined.
template <typename T>
void zero_effective(hran::ParamTable<T>& p) {
  for (const auto& name : p.names()) {
    if (name.ends_with(".v")) continue;
    hran::Tensor4<T>& t = p.at(name);
    for (int64_t i = 0; i < t.numel(); ++i) t[i] = T(0);
  }
}

template <typename T>
hran::Tensor4<T> random_tensor(hran::Shape4 shape, hran::Rng& rng, double lo = -1.0,
                               double hi = 1.0) {
  hran::Tensor4<T> t(shape);
  for (int64_t i = 0; i < t.numel(); ++i) t[i] = static_cast<T>(rng.uniform_real(lo, hi));
  return t;
}

template <typename T>
double max_abs_diff(const hran::Tensor4<T>& a, const hran::Tensor4<T>& b) {
  double m = 0.0;
  for (int64_t i = 0; i < a.numel(); ++i) {
    m = std::max(m, std::abs(static_cast<double>(a[i]) - static_cast<double>(b[i])));
  }
  return m;
}

template <typename T>
double max_rel_diff(const hran::Tensor4<T>& a, const hran::Tensor4<T>& b) {
  double m = 0.0;
  for (int64_t i = 0; i < a.numel(); ++i) {
    const double x = a[i], y = b[i];
    m = std::max(m, std::abs(x - y) / std::max({std::abs(x), std::abs(y), 1e-12}));
  }
  return m;
}

}  // namespace test_helpers
