#pragma once
#include <span>
#include <string>
#include <vector>

#include "hran/kernels.hpp"
#include "hran/tensor.hpp"

namespace hran {

enum class OpKind {
  Leaf,
  Conv2d,
  Conv1dChannels,
  Add,
  MulElem,
  MulChannelwise,
  Relu,
  Sigmoid,
  ConcatChannels,
  GlobalAvgPool,
  PixelShuffle,
  WeightNorm,
  Scale,
  Sum,
  L1Loss,
};

const char* op_name(OpKind k);

// Append-only computation record for reverse-mode differentiation. Node ids
// are topologically ordered by construction; one training step owns one tape.
// Every op checks its output for NaN/Inf and throws NonFiniteError rather
// than letting bad values propagate.
template <typename T>
class Tape {
 public:
  struct Node {
    OpKind kind;
    std::vector<int> inputs;
    Tensor4<T> value;
    Tensor4<T> grad;  // allocated lazily during backward
    int iarg = 0;     // conv padding / shuffle factor
    T sarg = T(0);    // scale constant
    Tensor4<T> aux;   // constant operand (l1 target)
  };

  int leaf(Tensor4<T> v) {
    require_finite(v, "leaf");
    return push(OpKind::Leaf, {}, std::move(v));
  }

  int conv2d(int x, int w, int b, int pad) {
    const Tensor4<T>* bias = b >= 0 ? &value(b) : nullptr;
    Tensor4<T> out = kernels::conv2d_forward(value(x), value(w), bias, pad);
    std::vector<int> in = b >= 0 ? std::vector<int>{x, w, b} : std::vector<int>{x, w};
    int id = push(OpKind::Conv2d, std::move(in), std::move(out));
    nodes_[id].iarg = pad;
    return id;
  }

  int add(int a, int b) { return push(OpKind::Add, {a, b}, kernels::add_forward(value(a), value(b))); }

  int mul(int a, int b) { return push(OpKind::MulElem, {a, b}, kernels::mul_forward(value(a), value(b))); }

  int mul_channelwise(int u, int alpha) {
    return push(OpKind::MulChannelwise, {u, alpha},
                kernels::mul_channelwise_forward(value(u), value(alpha)));
  }

  int relu(int x) { return push(OpKind::Relu, {x}, kernels::relu_forward(value(x))); }

  int sigmoid(int x) { return push(OpKind::Sigmoid, {x}, kernels::sigmoid_forward(value(x))); }

  int concat_channels(std::span<const int> xs) {
    std::vector<const Tensor4<T>*> vals;
    vals.reserve(xs.size());
    for (int id : xs) vals.push_back(&value(id));
    return push(OpKind::ConcatChannels, std::vector<int>(xs.begin(), xs.end()),
                kernels::concat_channels_forward(std::span<const Tensor4<T>* const>(vals)));
  }

  int global_avg_pool(int u) {
    return push(OpKind::GlobalAvgPool, {u}, kernels::global_avg_pool_forward(value(u)));
  }

  int pixel_shuffle(int x, int r) {
    int id = push(OpKind::PixelShuffle, {x}, kernels::pixel_shuffle_forward(value(x), r));
    nodes_[id].iarg = r;
    return id;
  }

  int conv1d_channels(int z, int w) {
    return push(OpKind::Conv1dChannels, {z, w},
                kernels::conv1d_channels_forward(value(z), value(w)));
  }

  int weight_norm(int v, int g) {
    return push(OpKind::WeightNorm, {v, g}, kernels::weight_norm_forward(value(v), value(g)));
  }

  int scale(int x, T c) {
    Tensor4<T> out(value(x).shape());
    for (int64_t i = 0; i < out.numel(); ++i) out[i] = c * value(x)[i];
    int id = push(OpKind::Scale, {x}, std::move(out));
    nodes_[id].sarg = c;
    return id;
  }

  int sum(int x) {
    int id = push(OpKind::Sum, {x}, Tensor4<T>::scalar(kernels::sum_all(value(x))));
    return id;
  }

  int l1_loss(int pred, Tensor4<T> target) {
    int id = push(OpKind::L1Loss, {pred},
                  Tensor4<T>::scalar(kernels::l1_loss_forward(value(pred), target)));
    nodes_[id].aux = std::move(target);
    return id;
  }

  const Tensor4<T>& value(int id) const { return nodes_[static_cast<size_t>(id)].value; }

  // Gradient of a node; zeros if the node was unreachable from the loss.
  const Tensor4<T>& grad(int id) {
    Node& n = nodes_[static_cast<size_t>(id)];
    if (n.grad.empty() && n.value.numel() > 0) n.grad = Tensor4<T>(n.value.shape());
    return n.grad;
  }

  size_t size() const { return nodes_.size(); }

  void backward(int loss_id) {
    Node& loss = nodes_[static_cast<size_t>(loss_id)];
    if (!(loss.value.shape() == Shape4{1, 1, 1, 1})) {
      throw ShapeError("backward: loss must be scalar 1x1x1x1, got " + loss.value.shape().str());
    }
    loss.grad = Tensor4<T>::scalar(T(1));
    for (int i = loss_id; i >= 0; --i) {
      Node& n = nodes_[static_cast<size_t>(i)];
      if (n.grad.empty()) continue;
      accumulate(n);
    }
  }

 private:
  int push(OpKind kind, std::vector<int> inputs, Tensor4<T> value) {
    require_finite(value, op_name(kind));
    nodes_.push_back(Node{kind, std::move(inputs), std::move(value), {}, 0, T(0), {}});
    return static_cast<int>(nodes_.size()) - 1;
  }

  Tensor4<T>& grad_buf(int id) {
    Node& n = nodes_[static_cast<size_t>(id)];
    if (n.grad.empty()) n.grad = Tensor4<T>(n.value.shape());
    return n.grad;
  }

  static void add_into(Tensor4<T>& dst, const Tensor4<T>& src) {
    for (int64_t i = 0; i < dst.numel(); ++i) dst[i] += src[i];
  }

  void accumulate(Node& n) {
    const Tensor4<T>& g = n.grad;
    switch (n.kind) {
      case OpKind::Leaf:
        break;
      case OpKind::Conv2d: {
        const Tensor4<T>& x = value(n.inputs[0]);
        const Tensor4<T>& w = value(n.inputs[1]);
        const bool has_bias = n.inputs.size() == 3;
        Tensor4<T> dx, dw, db;
        kernels::conv2d_backward(x, w, has_bias, g, n.iarg, dx, dw, db);
        add_into(grad_buf(n.inputs[0]), dx);
        add_into(grad_buf(n.inputs[1]), dw);
        if (has_bias) add_into(grad_buf(n.inputs[2]), db);
        break;
      }
      case OpKind::Conv1dChannels: {
        Tensor4<T> dz, dw;
        kernels::conv1d_channels_backward(value(n.inputs[0]), value(n.inputs[1]), g, dz, dw);
        add_into(grad_buf(n.inputs[0]), dz);
        add_into(grad_buf(n.inputs[1]), dw);
        break;
      }
      case OpKind::Add:
        add_into(grad_buf(n.inputs[0]), g);
        add_into(grad_buf(n.inputs[1]), g);
        break;
      case OpKind::MulElem: {
        const Tensor4<T>& a = value(n.inputs[0]);
        const Tensor4<T>& b = value(n.inputs[1]);
        Tensor4<T>& da = grad_buf(n.inputs[0]);
        for (int64_t i = 0; i < g.numel(); ++i) da[i] += g[i] * b[i];
        Tensor4<T>& db = grad_buf(n.inputs[1]);
        for (int64_t i = 0; i < g.numel(); ++i) db[i] += g[i] * a[i];
        break;
      }
      case OpKind::MulChannelwise: {
        const Tensor4<T>& u = value(n.inputs[0]);
        const Tensor4<T>& alpha = value(n.inputs[1]);
        const auto& s = u.shape();
        Tensor4<T>& du = grad_buf(n.inputs[0]);
        Tensor4<T>& dalpha = grad_buf(n.inputs[1]);
        for (int64_t bn = 0; bn < s.n; ++bn) {
          for (int64_t c = 0; c < s.c; ++c) {
            const T a = alpha.at(bn, c, 0, 0);
            const T* gp = &g.at(bn, c, 0, 0);
            const T* up = &u.at(bn, c, 0, 0);
            T* dup = &du.at(bn, c, 0, 0);
            T acc = T(0);
            for (int64_t j = 0; j < s.h * s.w; ++j) {
              dup[j] += a * gp[j];
              acc += gp[j] * up[j];
            }
            dalpha.at(bn, c, 0, 0) += acc;
          }
        }
        break;
      }
      case OpKind::Relu: {
        const Tensor4<T>& x = value(n.inputs[0]);
        Tensor4<T>& dx = grad_buf(n.inputs[0]);
        for (int64_t i = 0; i < g.numel(); ++i) {
          if (x[i] > T(0)) dx[i] += g[i];
        }
        break;
      }
      case OpKind::Sigmoid: {
        const Tensor4<T>& y = n.value;
        Tensor4<T>& dx = grad_buf(n.inputs[0]);
        for (int64_t i = 0; i < g.numel(); ++i) dx[i] += g[i] * y[i] * (T(1) - y[i]);
        break;
      }
      case OpKind::ConcatChannels: {
        const auto& os = n.value.shape();
        const int64_t hw = os.h * os.w;
        int64_t coff = 0;
        for (int in_id : n.inputs) {
          Tensor4<T>& dx = grad_buf(in_id);
          const int64_t cc = dx.shape().c;
          for (int64_t bn = 0; bn < os.n; ++bn) {
            for (int64_t c = 0; c < cc; ++c) {
              const T* gp = &g.at(bn, coff + c, 0, 0);
              T* dp = &dx.at(bn, c, 0, 0);
              for (int64_t j = 0; j < hw; ++j) dp[j] += gp[j];
            }
          }
          coff += cc;
        }
        break;
      }
      case OpKind::GlobalAvgPool: {
        const Tensor4<T>& u = value(n.inputs[0]);
        const auto& s = u.shape();
        const T inv = T(1) / static_cast<T>(s.h * s.w);
        Tensor4<T>& du = grad_buf(n.inputs[0]);
        for (int64_t bn = 0; bn < s.n; ++bn) {
          for (int64_t c = 0; c < s.c; ++c) {
            const T gv = g.at(bn, c, 0, 0) * inv;
            T* dp = &du.at(bn, c, 0, 0);
            for (int64_t j = 0; j < s.h * s.w; ++j) dp[j] += gv;
          }
        }
        break;
      }
      case OpKind::PixelShuffle: {
        add_into(grad_buf(n.inputs[0]),
                 kernels::pixel_shuffle_backward(g, value(n.inputs[0]).shape(), n.iarg));
        break;
      }
      case OpKind::WeightNorm: {
        Tensor4<T> dv, dg;
        kernels::weight_norm_backward(value(n.inputs[0]), value(n.inputs[1]), g, dv, dg);
        add_into(grad_buf(n.inputs[0]), dv);
        add_into(grad_buf(n.inputs[1]), dg);
        break;
      }
      case OpKind::Scale: {
        Tensor4<T>& dx = grad_buf(n.inputs[0]);
        for (int64_t i = 0; i < g.numel(); ++i) dx[i] += n.sarg * g[i];
        break;
      }
      case OpKind::Sum: {
        const T gv = g[0];
        Tensor4<T>& dx = grad_buf(n.inputs[0]);
        for (int64_t i = 0; i < dx.numel(); ++i) dx[i] += gv;
        break;
      }
      case OpKind::L1Loss: {
        add_into(grad_buf(n.inputs[0]),
                 kernels::l1_loss_backward(value(n.inputs[0]), n.aux, g[0]));
        break;
      }
    }
  }

  std::vector<Node> nodes_;
};

inline const char* op_name(OpKind k) {
  switch (k) {
    case OpKind::Leaf: return "leaf";
    case OpKind::Conv2d: return "conv2d";
    case OpKind::Conv1dChannels: return "conv1d_channels";
    case OpKind::Add: return "add";
    case OpKind::MulElem: return "mul";
    case OpKind::MulChannelwise: return "mul_channelwise";
    case OpKind::Relu: return "relu";
    case OpKind::Sigmoid: return "sigmoid";
    case OpKind::ConcatChannels: return "concat_channels";
    case OpKind::GlobalAvgPool: return "global_avg_pool";
    case OpKind::PixelShuffle: return "pixel_shuffle";
    case OpKind::WeightNorm: return "weight_norm";
    case OpKind::Scale: return "scale";
    case OpKind::Sum: return "sum";
    case OpKind::L1Loss: return "l1_loss";
  }
  return "unknown";
}

}  // namespace hran
