#pragma once
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "hran/tensor.hpp"

// Forward and backward kernels for every primitive op. All kernels are pure,
// single-threaded, and accumulate each output element in a fixed order, so
// results are bit-identical run to run. Convolution is cross-correlation
// (no kernel flip), stride 1, padding (k-1)/2 with k in {1, 3}.

namespace hran::kernels {

template <typename T>
void check_conv_args(const Tensor4<T>& x, const Tensor4<T>& w, const Tensor4<T>* bias, int pad) {
  const auto& ws = w.shape();
  if (ws.h != ws.w || (ws.h != 1 && ws.h != 3)) {
    throw ShapeError("conv2d: kernel must be 1x1 or 3x3, got weight " + ws.str());
  }
  if (pad != (ws.h - 1) / 2) {
    throw ShapeError("conv2d: padding " + std::to_string(pad) + " must be (k-1)/2 for weight " +
                     ws.str());
  }
  if (x.shape().c != ws.c) {
    throw ShapeError("conv2d: input channels mismatch, input " + x.shape().str() + " vs weight " +
                     ws.str());
  }
  if (bias && !(bias->shape() == Shape4{1, ws.n, 1, 1})) {
    throw ShapeError("conv2d: bias shape " + bias->shape().str() + " must be 1x" +
                     std::to_string(ws.n) + "x1x1 for weight " + ws.str());
  }
}

// im2col for one batch item: rows are (c_in * k * k), columns are (h * w).
template <typename T>
void im2col(const Tensor4<T>& x, int64_t n, int k, int pad, std::vector<T>& cols) {
  const int64_t C = x.shape().c, H = x.shape().h, W = x.shape().w;
  cols.assign(static_cast<size_t>(C * k * k * H * W), T(0));
  for (int64_t c = 0; c < C; ++c) {
    for (int dy = 0; dy < k; ++dy) {
      for (int dx = 0; dx < k; ++dx) {
        T* row = cols.data() + ((c * k + dy) * k + dx) * H * W;
        for (int64_t y = 0; y < H; ++y) {
          const int64_t sy = y + dy - pad;
          if (sy < 0 || sy >= H) continue;
          const T* src = &x.at(n, c, sy, 0);
          T* dst = row + y * W;
          const int64_t x0 = std::max<int64_t>(0, pad - dx);
          const int64_t x1 = std::min<int64_t>(W, W + pad - dx);
          for (int64_t xx = x0; xx < x1; ++xx) dst[xx] = src[xx + dx - pad];
        }
      }
    }
  }
}

template <typename T>
Tensor4<T> conv2d_forward(const Tensor4<T>& x, const Tensor4<T>& w, const Tensor4<T>* bias,
                          int pad) {
  check_conv_args(x, w, bias, pad);
  const int64_t N = x.shape().n, H = x.shape().h, W = x.shape().w;
  const int64_t Cout = w.shape().n, K = w.shape().h, R = w.shape().c * K * K;
  Tensor4<T> out({N, Cout, H, W});
  const int64_t HW = H * W;
  std::vector<T> cols;
  for (int64_t n = 0; n < N; ++n) {
    im2col(x, n, static_cast<int>(K), pad, cols);
    for (int64_t oc = 0; oc < Cout; ++oc) {
      T* orow = &out.at(n, oc, 0, 0);
      const T b = bias ? bias->at(0, oc, 0, 0) : T(0);
      for (int64_t j = 0; j < HW; ++j) orow[j] = b;
      const T* wrow = w.data() + oc * R;
      for (int64_t r = 0; r < R; ++r) {
        const T wv = wrow[r];
        if (wv == T(0)) continue;
        const T* crow = cols.data() + r * HW;
        for (int64_t j = 0; j < HW; ++j) orow[j] += wv * crow[j];
      }
    }
  }
  return out;
}

// col2im scatter-add, the adjoint of im2col.
template <typename T>
void col2im_add(const std::vector<T>& cols, int64_t n, int k, int pad, Tensor4<T>& dx) {
  const int64_t C = dx.shape().c, H = dx.shape().h, W = dx.shape().w;
  for (int64_t c = 0; c < C; ++c) {
    for (int dy = 0; dy < k; ++dy) {
      for (int dx2 = 0; dx2 < k; ++dx2) {
        const T* row = cols.data() + ((c * k + dy) * k + dx2) * H * W;
        for (int64_t y = 0; y < H; ++y) {
          const int64_t sy = y + dy - pad;
          if (sy < 0 || sy >= H) continue;
          T* dst = &dx.at(n, c, sy, 0);
          const T* src = row + y * W;
          const int64_t x0 = std::max<int64_t>(0, pad - dx2);
          const int64_t x1 = std::min<int64_t>(W, W + pad - dx2);
          for (int64_t xx = x0; xx < x1; ++xx) dst[xx + dx2 - pad] += src[xx];
        }
      }
    }
  }
}

template <typename T>
void conv2d_backward(const Tensor4<T>& x, const Tensor4<T>& w, bool has_bias,
                     const Tensor4<T>& dout, int pad, Tensor4<T>& dx, Tensor4<T>& dw,
                     Tensor4<T>& db) {
  const int64_t N = x.shape().n, H = x.shape().h, W = x.shape().w;
  const int64_t Cout = w.shape().n, K = w.shape().h, R = w.shape().c * K * K;
  const int64_t HW = H * W;
  dx = Tensor4<T>(x.shape());
  dw = Tensor4<T>(w.shape());
  if (has_bias) db = Tensor4<T>({1, Cout, 1, 1});
  std::vector<T> cols, colgrad(static_cast<size_t>(R * HW));
  for (int64_t n = 0; n < N; ++n) {
    im2col(x, n, static_cast<int>(K), pad, cols);
    // dW += dout_mat * cols^T
    for (int64_t oc = 0; oc < Cout; ++oc) {
      const T* grow = &dout.at(n, oc, 0, 0);
      T* dwrow = dw.data() + oc * R;
      for (int64_t r = 0; r < R; ++r) {
        const T* crow = cols.data() + r * HW;
        T acc = T(0);
        for (int64_t j = 0; j < HW; ++j) acc += grow[j] * crow[j];
        dwrow[r] += acc;
      }
      if (has_bias) {
        T acc = T(0);
        for (int64_t j = 0; j < HW; ++j) acc += grow[j];
        db.at(0, oc, 0, 0) += acc;
      }
    }
    // colgrad = W^T * dout_mat, then scatter back into dx
    std::fill(colgrad.begin(), colgrad.end(), T(0));
    for (int64_t oc = 0; oc < Cout; ++oc) {
      const T* grow = &dout.at(n, oc, 0, 0);
      const T* wrow = w.data() + oc * R;
      for (int64_t r = 0; r < R; ++r) {
        const T wv = wrow[r];
        if (wv == T(0)) continue;
        T* crow = colgrad.data() + r * HW;
        for (int64_t j = 0; j < HW; ++j) crow[j] += wv * grow[j];
      }
    }
    col2im_add(colgrad, n, static_cast<int>(K), pad, dx);
  }
}

template <typename T>
Tensor4<T> add_forward(const Tensor4<T>& a, const Tensor4<T>& b) {
  require_same_shape(a, b, "add");
  Tensor4<T> out(a.shape());
  for (int64_t i = 0; i < a.numel(); ++i) out[i] = a[i] + b[i];
  return out;
}

template <typename T>
Tensor4<T> mul_forward(const Tensor4<T>& a, const Tensor4<T>& b) {
  require_same_shape(a, b, "mul");
  Tensor4<T> out(a.shape());
  for (int64_t i = 0; i < a.numel(); ++i) out[i] = a[i] * b[i];
  return out;
}

template <typename T>
void check_channel_vector(const Tensor4<T>& u, const Tensor4<T>& alpha, const char* op) {
  const auto& as = alpha.shape();
  if (as.h != 1 || as.w != 1 || as.c != u.shape().c || as.n != u.shape().n) {
    throw ShapeError(std::string(op) + ": per-channel vector " + as.str() +
                     " incompatible with input " + u.shape().str());
  }
}

template <typename T>
Tensor4<T> mul_channelwise_forward(const Tensor4<T>& u, const Tensor4<T>& alpha) {
  check_channel_vector(u, alpha, "mul_channelwise");
  const auto& s = u.shape();
  Tensor4<T> out(s);
  for (int64_t n = 0; n < s.n; ++n) {
    for (int64_t c = 0; c < s.c; ++c) {
      const T a = alpha.at(n, c, 0, 0);
      const T* src = &u.at(n, c, 0, 0);
      T* dst = &out.at(n, c, 0, 0);
      for (int64_t j = 0; j < s.h * s.w; ++j) dst[j] = a * src[j];
    }
  }
  return out;
}

template <typename T>
Tensor4<T> relu_forward(const Tensor4<T>& x) {
  Tensor4<T> out(x.shape());
  for (int64_t i = 0; i < x.numel(); ++i) out[i] = x[i] > T(0) ? x[i] : T(0);
  return out;
}

template <typename T>
T sigmoid_scalar(T x) {
  if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
  const T e = std::exp(x);
  return e / (T(1) + e);
}

template <typename T>
Tensor4<T> sigmoid_forward(const Tensor4<T>& x) {
  Tensor4<T> out(x.shape());
  for (int64_t i = 0; i < x.numel(); ++i) out[i] = sigmoid_scalar(x[i]);
  return out;
}

template <typename T>
Tensor4<T> concat_channels_forward(std::span<const Tensor4<T>* const> xs) {
  if (xs.empty()) throw ShapeError("concat_channels: empty input list");
  const Shape4 s0 = xs[0]->shape();
  int64_t ctotal = 0;
  for (const auto* x : xs) {
    const auto& s = x->shape();
    if (s.n != s0.n || s.h != s0.h || s.w != s0.w) {
      throw ShapeError("concat_channels: shape mismatch " + s.str() + " vs " + s0.str());
    }
    ctotal += s.c;
  }
  Tensor4<T> out({s0.n, ctotal, s0.h, s0.w});
  const int64_t hw = s0.h * s0.w;
  for (int64_t n = 0; n < s0.n; ++n) {
    int64_t coff = 0;
    for (const auto* x : xs) {
      for (int64_t c = 0; c < x->shape().c; ++c) {
        const T* src = &x->at(n, c, 0, 0);
        T* dst = &out.at(n, coff + c, 0, 0);
        for (int64_t j = 0; j < hw; ++j) dst[j] = src[j];
      }
      coff += x->shape().c;
    }
  }
  return out;
}

// Channels [c0, c1) of x, as its own tensor.
template <typename T>
Tensor4<T> slice_channels(const Tensor4<T>& x, int64_t c0, int64_t c1) {
  const auto& s = x.shape();
  if (c0 < 0 || c1 > s.c || c0 >= c1) {
    throw ShapeError("slice_channels: range [" + std::to_string(c0) + "," + std::to_string(c1) +
                     ") invalid for " + s.str());
  }
  Tensor4<T> out({s.n, c1 - c0, s.h, s.w});
  const int64_t hw = s.h * s.w;
  for (int64_t n = 0; n < s.n; ++n) {
    for (int64_t c = c0; c < c1; ++c) {
      const T* src = &x.at(n, c, 0, 0);
      T* dst = &out.at(n, c - c0, 0, 0);
      for (int64_t j = 0; j < hw; ++j) dst[j] = src[j];
    }
  }
  return out;
}

template <typename T>
Tensor4<T> global_avg_pool_forward(const Tensor4<T>& u) {
  const auto& s = u.shape();
  if (s.h * s.w < 1) {
    throw ShapeError("global_avg_pool: empty spatial extent in " + s.str());
  }
  Tensor4<T> out({s.n, s.c, 1, 1});
  const T inv = T(1) / static_cast<T>(s.h * s.w);
  for (int64_t n = 0; n < s.n; ++n) {
    for (int64_t c = 0; c < s.c; ++c) {
      const T* src = &u.at(n, c, 0, 0);
      T acc = T(0);
      for (int64_t j = 0; j < s.h * s.w; ++j) acc += src[j];
      out.at(n, c, 0, 0) = acc * inv;
    }
  }
  return out;
}

template <typename T>
Tensor4<T> pixel_shuffle_forward(const Tensor4<T>& x, int r) {
  const auto& s = x.shape();
  if (r < 1 || s.c % (int64_t(r) * r) != 0) {
    throw ShapeError("pixel_shuffle: channels of " + s.str() + " not divisible by r^2 with r=" +
                     std::to_string(r));
  }
  const int64_t Cout = s.c / (int64_t(r) * r);
  Tensor4<T> out({s.n, Cout, s.h * r, s.w * r});
  for (int64_t n = 0; n < s.n; ++n) {
    for (int64_t c = 0; c < Cout; ++c) {
      for (int di = 0; di < r; ++di) {
        for (int dj = 0; dj < r; ++dj) {
          const int64_t cin = c * r * r + int64_t(di) * r + dj;
          for (int64_t i = 0; i < s.h; ++i) {
            const T* src = &x.at(n, cin, i, 0);
            for (int64_t j = 0; j < s.w; ++j) {
              out.at(n, c, i * r + di, j * r + dj) = src[j];
            }
          }
        }
      }
    }
  }
  return out;
}

template <typename T>
Tensor4<T> pixel_shuffle_backward(const Tensor4<T>& dout, Shape4 in_shape, int r) {
  Tensor4<T> dx(in_shape);
  const int64_t Cout = in_shape.c / (int64_t(r) * r);
  for (int64_t n = 0; n < in_shape.n; ++n) {
    for (int64_t c = 0; c < Cout; ++c) {
      for (int di = 0; di < r; ++di) {
        for (int dj = 0; dj < r; ++dj) {
          const int64_t cin = c * r * r + int64_t(di) * r + dj;
          for (int64_t i = 0; i < in_shape.h; ++i) {
            T* dst = &dx.at(n, cin, i, 0);
            for (int64_t j = 0; j < in_shape.w; ++j) {
              dst[j] = dout.at(n, c, i * r + di, j * r + dj);
            }
          }
        }
      }
    }
  }
  return dx;
}

// 1-d convolution across the channel axis (zero-padded). z is (n,C,1,1),
// w is (1,1,1,k) with odd k.
template <typename T>
Tensor4<T> conv1d_channels_forward(const Tensor4<T>& z, const Tensor4<T>& w) {
  const auto& zs = z.shape();
  const auto& ws = w.shape();
  if (zs.h != 1 || zs.w != 1) {
    throw ShapeError("conv1d_channels: input must be a channel descriptor, got " + zs.str());
  }
  if (ws.n != 1 || ws.c != 1 || ws.h != 1 || ws.w % 2 != 1) {
    throw ShapeError("conv1d_channels: weight must be 1x1x1xk with odd k, got " + ws.str());
  }
  const int64_t k = ws.w, off = (k - 1) / 2;
  Tensor4<T> out(zs);
  for (int64_t n = 0; n < zs.n; ++n) {
    for (int64_t c = 0; c < zs.c; ++c) {
      T acc = T(0);
      for (int64_t t = 0; t < k; ++t) {
        const int64_t cc = c + t - off;
        if (cc >= 0 && cc < zs.c) acc += w[t] * z.at(n, cc, 0, 0);
      }
      out.at(n, c, 0, 0) = acc;
    }
  }
  return out;
}

template <typename T>
void conv1d_channels_backward(const Tensor4<T>& z, const Tensor4<T>& w, const Tensor4<T>& dout,
                              Tensor4<T>& dz, Tensor4<T>& dw) {
  const auto& zs = z.shape();
  const int64_t k = w.shape().w, off = (k - 1) / 2;
  dz = Tensor4<T>(zs);
  dw = Tensor4<T>(w.shape());
  for (int64_t n = 0; n < zs.n; ++n) {
    for (int64_t c = 0; c < zs.c; ++c) {
      const T g = dout.at(n, c, 0, 0);
      for (int64_t t = 0; t < k; ++t) {
        const int64_t cc = c + t - off;
        if (cc >= 0 && cc < zs.c) {
          dz.at(n, cc, 0, 0) += g * w[t];
          dw[t] += g * z.at(n, cc, 0, 0);
        }
      }
    }
  }
}

// Effective kernel for weight normalization: w = g * v / ||v||, norm per
// output channel (leading axis of v). g is (1, c_out, 1, 1).
template <typename T>
Tensor4<T> weight_norm_forward(const Tensor4<T>& v, const Tensor4<T>& g,
                               std::vector<T>* norms_out = nullptr) {
  const auto& vs = v.shape();
  if (!(g.shape() == Shape4{1, vs.n, 1, 1})) {
    throw ShapeError("weight_norm: gain shape " + g.shape().str() + " must be 1x" +
                     std::to_string(vs.n) + "x1x1 for direction " + vs.str());
  }
  const int64_t R = vs.c * vs.h * vs.w;
  Tensor4<T> out(vs);
  if (norms_out) norms_out->assign(static_cast<size_t>(vs.n), T(0));
  for (int64_t oc = 0; oc < vs.n; ++oc) {
    const T* vrow = v.data() + oc * R;
    T sq = T(0);
    for (int64_t i = 0; i < R; ++i) sq += vrow[i] * vrow[i];
    const T norm = std::sqrt(sq);
    if (!(norm >= T(1e-12))) {
      throw NonFiniteError("weight_norm: zero-norm direction at output channel " +
                           std::to_string(oc));
    }
    if (norms_out) (*norms_out)[static_cast<size_t>(oc)] = norm;
    const T scale = g.at(0, oc, 0, 0) / norm;
    T* orow = out.data() + oc * R;
    for (int64_t i = 0; i < R; ++i) orow[i] = scale * vrow[i];
  }
  return out;
}

template <typename T>
void weight_norm_backward(const Tensor4<T>& v, const Tensor4<T>& g, const Tensor4<T>& dout,
                          Tensor4<T>& dv, Tensor4<T>& dg) {
  const auto& vs = v.shape();
  const int64_t R = vs.c * vs.h * vs.w;
  dv = Tensor4<T>(vs);
  dg = Tensor4<T>(g.shape());
  for (int64_t oc = 0; oc < vs.n; ++oc) {
    const T* vrow = v.data() + oc * R;
    const T* grow = dout.data() + oc * R;
    T sq = T(0), dot = T(0);
    for (int64_t i = 0; i < R; ++i) {
      sq += vrow[i] * vrow[i];
      dot += grow[i] * vrow[i];
    }
    const T norm = std::sqrt(sq);
    const T gv = g.at(0, oc, 0, 0);
    dg.at(0, oc, 0, 0) = dot / norm;
    T* dvrow = dv.data() + oc * R;
    const T a = gv / norm;
    const T b = gv * dot / (norm * norm * norm);
    for (int64_t i = 0; i < R; ++i) dvrow[i] = a * grow[i] - b * vrow[i];
  }
}

template <typename T>
T sum_all(const Tensor4<T>& x) {
  T acc = T(0);
  for (int64_t i = 0; i < x.numel(); ++i) acc += x[i];
  return acc;
}

// Mean absolute error. Subgradient at ties is sign(0) := 0.
template <typename T>
T l1_loss_forward(const Tensor4<T>& pred, const Tensor4<T>& target) {
  require_same_shape(pred, target, "l1_loss");
  T acc = T(0);
  for (int64_t i = 0; i < pred.numel(); ++i) acc += std::abs(pred[i] - target[i]);
  return acc / static_cast<T>(pred.numel());
}

template <typename T>
Tensor4<T> l1_loss_backward(const Tensor4<T>& pred, const Tensor4<T>& target, T dloss) {
  Tensor4<T> dpred(pred.shape());
  const T invn = dloss / static_cast<T>(pred.numel());
  for (int64_t i = 0; i < pred.numel(); ++i) {
    const T d = pred[i] - target[i];
    dpred[i] = d > T(0) ? invn : (d < T(0) ? -invn : T(0));
  }
  return dpred;
}

}  // namespace hran::kernels
