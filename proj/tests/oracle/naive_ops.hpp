#pragma once
// Independent reference implementations used as test oracles. Everything is
// written as direct nested loops over the definitions; none of it shares
// code with the library kernels.
#include <cmath>
#include <vector>

#include "hran/tensor.hpp"

namespace oracle {

using hran::Shape4;
using hran::Tensor4;

template <typename T>
Tensor4<T> conv2d(const Tensor4<T>& x, const Tensor4<T>& w, const Tensor4<T>* bias, int pad) {
  const auto& xs = x.shape();
  const auto& ws = w.shape();
  Tensor4<T> out({xs.n, ws.n, xs.h, xs.w});
  for (int64_t n = 0; n < xs.n; ++n) {
    for (int64_t oc = 0; oc < ws.n; ++oc) {
      for (int64_t y = 0; y < xs.h; ++y) {
        for (int64_t xcol = 0; xcol < xs.w; ++xcol) {
          T acc = bias ? bias->at(0, oc, 0, 0) : T(0);
          for (int64_t ic = 0; ic < ws.c; ++ic) {
            for (int64_t dy = 0; dy < ws.h; ++dy) {
              for (int64_t dx = 0; dx < ws.w; ++dx) {
                const int64_t sy = y + dy - pad;
                const int64_t sx = xcol + dx - pad;
                if (sy < 0 || sy >= xs.h || sx < 0 || sx >= xs.w) continue;
                acc += w.at(oc, ic, dy, dx) * x.at(n, ic, sy, sx);
              }
            }
          }
          out.at(n, oc, y, xcol) = acc;
        }
      }
    }
  }
  return out;
}

template <typename T>
Tensor4<T> relu(const Tensor4<T>& x) {
  Tensor4<T> out(x.shape());
  for (int64_t i = 0; i < x.numel(); ++i) out[i] = std::max(x[i], T(0));
  return out;
}

template <typename T>
Tensor4<T> sigmoid(const Tensor4<T>& x) {
  Tensor4<T> out(x.shape());
  for (int64_t i = 0; i < x.numel(); ++i) out[i] = T(1) / (T(1) + std::exp(-x[i]));
  return out;
}

template <typename T>
Tensor4<T> add(const Tensor4<T>& a, const Tensor4<T>& b) {
  Tensor4<T> out(a.shape());
  for (int64_t i = 0; i < a.numel(); ++i) out[i] = a[i] + b[i];
  return out;
}

template <typename T>
Tensor4<T> global_avg_pool(const Tensor4<T>& u) {
  const auto& s = u.shape();
  Tensor4<T> z({s.n, s.c, 1, 1});
  for (int64_t n = 0; n < s.n; ++n) {
    for (int64_t c = 0; c < s.c; ++c) {
      T acc = T(0);
      for (int64_t y = 0; y < s.h; ++y) {
        for (int64_t x = 0; x < s.w; ++x) acc += u.at(n, c, y, x);
      }
      z.at(n, c, 0, 0) = acc / static_cast<T>(s.h * s.w);
    }
  }
  return z;
}

template <typename T>
Tensor4<T> scale_channels(const Tensor4<T>& u, const Tensor4<T>& alpha) {
  const auto& s = u.shape();
  Tensor4<T> out(s);
  for (int64_t n = 0; n < s.n; ++n) {
    for (int64_t c = 0; c < s.c; ++c) {
      for (int64_t y = 0; y < s.h; ++y) {
        for (int64_t x = 0; x < s.w; ++x) {
          out.at(n, c, y, x) = alpha.at(n, c, 0, 0) * u.at(n, c, y, x);
        }
      }
    }
  }
  return out;
}

// output(n, c, r*i+di, r*j+dj) = input(n, c*r^2 + di*r + dj, i, j)
template <typename T>
Tensor4<T> pixel_shuffle(const Tensor4<T>& x, int r) {
  const auto& s = x.shape();
  Tensor4<T> out({s.n, s.c / (r * r), s.h * r, s.w * r});
  for (int64_t n = 0; n < s.n; ++n) {
    for (int64_t c = 0; c < s.c; ++c) {
      const int64_t co = c / (r * r);
      const int64_t di = (c % (r * r)) / r;
      const int64_t dj = c % r;
      for (int64_t i = 0; i < s.h; ++i) {
        for (int64_t j = 0; j < s.w; ++j) {
          out.at(n, co, i * r + di, j * r + dj) = x.at(n, c, i, j);
        }
      }
    }
  }
  return out;
}

template <typename T>
Tensor4<T> concat_channels(const std::vector<Tensor4<T>>& xs) {
  const auto& s0 = xs.front().shape();
  int64_t ct = 0;
  for (const auto& x : xs) ct += x.shape().c;
  Tensor4<T> out({s0.n, ct, s0.h, s0.w});
  for (int64_t n = 0; n < s0.n; ++n) {
    int64_t off = 0;
    for (const auto& x : xs) {
      for (int64_t c = 0; c < x.shape().c; ++c) {
        for (int64_t y = 0; y < s0.h; ++y) {
          for (int64_t xx = 0; xx < s0.w; ++xx) out.at(n, off + c, y, xx) = x.at(n, c, y, xx);
        }
      }
      off += x.shape().c;
    }
  }
  return out;
}

// w = g * v / ||v||_2 per output channel
template <typename T>
Tensor4<T> weight_norm(const Tensor4<T>& v, const Tensor4<T>& g) {
  const auto& s = v.shape();
  Tensor4<T> out(s);
  for (int64_t oc = 0; oc < s.n; ++oc) {
    T sq = T(0);
    for (int64_t c = 0; c < s.c; ++c) {
      for (int64_t y = 0; y < s.h; ++y) {
        for (int64_t x = 0; x < s.w; ++x) sq += v.at(oc, c, y, x) * v.at(oc, c, y, x);
      }
    }
    const T norm = std::sqrt(sq);
    for (int64_t c = 0; c < s.c; ++c) {
      for (int64_t y = 0; y < s.h; ++y) {
        for (int64_t x = 0; x < s.w; ++x) {
          out.at(oc, c, y, x) = g.at(0, oc, 0, 0) * v.at(oc, c, y, x) / norm;
        }
      }
    }
  }
  return out;
}

}  // namespace oracle
