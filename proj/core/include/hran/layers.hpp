#pragma once
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "hran/rng.hpp"
#include "hran/tape.hpp"
#include "hran/tensor.hpp"

namespace hran {

// Named parameter tensors in registration order. The order defines both the
// initialization draw sequence and the checkpoint layout.
template <typename T>
class ParamTable {
 public:
  Tensor4<T>& add(const std::string& name, Shape4 shape) {
    auto [it, inserted] = map_.emplace(name, Tensor4<T>(shape));
    if (!inserted) throw Error("duplicate parameter name: " + name);
    order_.push_back(name);
    return it->second;
  }

  bool has(const std::string& name) const { return map_.count(name) != 0; }

  Tensor4<T>& at(const std::string& name) {
    auto it = map_.find(name);
    if (it == map_.end()) throw Error("unknown parameter name: " + name);
    return it->second;
  }
  const Tensor4<T>& at(const std::string& name) const {
    auto it = map_.find(name);
    if (it == map_.end()) throw Error("unknown parameter name: " + name);
    return it->second;
  }

  const std::vector<std::string>& names() const { return order_; }
  size_t size() const { return order_.size(); }

  int64_t total_scalars() const {
    int64_t total = 0;
    for (const auto& name : order_) total += at(name).numel();
    return total;
  }

  template <typename U>
  ParamTable<U> cast() const {
    ParamTable<U> out;
    for (const auto& name : order_) out.add(name, at(name).shape()) = at(name).template cast<U>();
    return out;
  }

 private:
  std::vector<std::string> order_;
  std::unordered_map<std::string, Tensor4<T>> map_;
};

// --- executors -------------------------------------------------------------
//
// Network wiring is written once against this informal interface and run
// either on a Tape (training, gradients) or eagerly (inference, no graph).

template <typename T>
struct TapeOps {
  using V = int;
  Tape<T>* tape;
  ParamTable<T>* params;
  std::unordered_map<std::string, int> leaf_ids;

  V param(const std::string& name) {
    auto it = leaf_ids.find(name);
    if (it != leaf_ids.end()) return it->second;
    int id = tape->leaf(params->at(name));
    leaf_ids.emplace(name, id);
    return id;
  }
  V input(Tensor4<T> x) { return tape->leaf(std::move(x)); }
  V conv2d(V x, V w, std::optional<V> b, int pad) { return tape->conv2d(x, w, b ? *b : -1, pad); }
  V weight_norm(V v, V g) { return tape->weight_norm(v, g); }
  V add(V a, V b) { return tape->add(a, b); }
  V relu(V x) { return tape->relu(x); }
  V sigmoid(V x) { return tape->sigmoid(x); }
  V mul(V a, V b) { return tape->mul(a, b); }
  V mul_channelwise(V u, V alpha) { return tape->mul_channelwise(u, alpha); }
  V global_avg_pool(V u) { return tape->global_avg_pool(u); }
  V pixel_shuffle(V x, int r) { return tape->pixel_shuffle(x, r); }
  V conv1d_channels(V z, V w) { return tape->conv1d_channels(z, w); }
  V concat(const std::vector<V>& xs) { return tape->concat_channels(xs); }
};

template <typename T>
struct EagerOps {
  using V = std::shared_ptr<const Tensor4<T>>;
  const ParamTable<T>* params;

  static V wrap(Tensor4<T> t, const char* op) {
    require_finite(t, op);
    return std::make_shared<const Tensor4<T>>(std::move(t));
  }
  V param(const std::string& name) {
    // aliases the table entry, which outlives the forward pass
    return V(&params->at(name), [](const Tensor4<T>*) {});
  }
  V input(Tensor4<T> x) { return wrap(std::move(x), "leaf"); }
  V conv2d(V x, V w, std::optional<V> b, int pad) {
    return wrap(kernels::conv2d_forward(*x, *w, b ? b->get() : nullptr, pad), "conv2d");
  }
  V weight_norm(V v, V g) { return wrap(kernels::weight_norm_forward(*v, *g), "weight_norm"); }
  V add(V a, V b) { return wrap(kernels::add_forward(*a, *b), "add"); }
  V relu(V x) { return wrap(kernels::relu_forward(*x), "relu"); }
  V sigmoid(V x) { return wrap(kernels::sigmoid_forward(*x), "sigmoid"); }
  V mul(V a, V b) { return wrap(kernels::mul_forward(*a, *b), "mul"); }
  V mul_channelwise(V u, V alpha) {
    return wrap(kernels::mul_channelwise_forward(*u, *alpha), "mul_channelwise");
  }
  V global_avg_pool(V u) { return wrap(kernels::global_avg_pool_forward(*u), "global_avg_pool"); }
  V pixel_shuffle(V x, int r) { return wrap(kernels::pixel_shuffle_forward(*x, r), "pixel_shuffle"); }
  V conv1d_channels(V z, V w) {
    return wrap(kernels::conv1d_channels_forward(*z, *w), "conv1d_channels");
  }
  V concat(const std::vector<V>& xs) {
    std::vector<const Tensor4<T>*> vals;
    vals.reserve(xs.size());
    for (const auto& x : xs) vals.push_back(x.get());
    return wrap(kernels::concat_channels_forward(std::span<const Tensor4<T>* const>(vals)),
                "concat_channels");
  }
};

// --- layer parameter registration and initialization ------------------------

enum class AttentionKind { LCA, CA, ECA, PA, None };
enum class AttentionPlacement { Parallel, InPlace };

struct AttentionHyper {
  int channels = 0;
  int ca_reduction = 16;
  int eca_kernel = 3;
};

// Kaiming-uniform fan-in draw for a conv direction tensor, with the conv
// default negative-slope parameter a = sqrt(5): bound = 1/sqrt(fan_in).
// The ReLU-gain bound sqrt(6/fan_in) doubles activation variance across the
// network's linear segments (bank bottlenecks, the upsampler pair) and
// starts training an order of magnitude off scale.
template <typename T>
void fill_kaiming_uniform(Tensor4<T>& v, Rng& rng) {
  const auto& s = v.shape();
  const double fan_in = static_cast<double>(s.c * s.h * s.w);
  const double bound = 1.0 / std::sqrt(fan_in);
  for (int64_t i = 0; i < v.numel(); ++i) {
    v[i] = static_cast<T>(rng.uniform_real(-bound, bound));
  }
}

// Weight-normalized conv: direction v, per-output-channel gain g, bias.
// g starts at ||v|| so the effective kernel equals its raw initialization.
template <typename T>
void init_wn_conv(ParamTable<T>& table, Rng& rng, const std::string& prefix, int64_t cout,
                  int64_t cin, int k) {
  Tensor4<T>& v = table.add(prefix + ".v", {cout, cin, k, k});
  fill_kaiming_uniform(v, rng);
  Tensor4<T>& g = table.add(prefix + ".g", {1, cout, 1, 1});
  const int64_t row = cin * int64_t(k) * k;
  for (int64_t oc = 0; oc < cout; ++oc) {
    T sq = T(0);
    for (int64_t i = 0; i < row; ++i) sq += v[oc * row + i] * v[oc * row + i];
    g.at(0, oc, 0, 0) = std::sqrt(sq);
  }
  table.add(prefix + ".bias", {1, cout, 1, 1});
}

// Attention weights are zero-initialized: every variant starts as a neutral
// 0.5 gate. They carry no bias and no weight normalization.
template <typename T>
void init_attention(ParamTable<T>& table, const std::string& prefix, AttentionKind kind,
                    const AttentionHyper& hyper) {
  const int64_t C = hyper.channels;
  switch (kind) {
    case AttentionKind::LCA:
      table.add(prefix + ".w", {C, C, 1, 1});
      break;
    case AttentionKind::CA: {
      if (C % hyper.ca_reduction != 0) {
        throw ConfigError("ca attention: channels " + std::to_string(C) +
                          " not divisible by reduction " + std::to_string(hyper.ca_reduction));
      }
      const int64_t mid = C / hyper.ca_reduction;
      table.add(prefix + ".w1", {mid, C, 1, 1});
      table.add(prefix + ".w2", {C, mid, 1, 1});
      break;
    }
    case AttentionKind::ECA:
      if (hyper.eca_kernel % 2 != 1 || hyper.eca_kernel < 1) {
        throw ConfigError("eca attention: kernel size must be odd and positive, got " +
                          std::to_string(hyper.eca_kernel));
      }
      table.add(prefix + ".w", {1, 1, 1, hyper.eca_kernel});
      break;
    case AttentionKind::PA:
      table.add(prefix + ".w", {C, C, 1, 1});
      break;
    case AttentionKind::None:
      break;
  }
}

inline std::string attention_name(AttentionKind kind) {
  switch (kind) {
    case AttentionKind::LCA: return "lca";
    case AttentionKind::CA: return "ca";
    case AttentionKind::ECA: return "eca";
    case AttentionKind::PA: return "pa";
    case AttentionKind::None: return "none";
  }
  return "none";
}

// --- layer forward wiring ----------------------------------------------------

// Conv with weight normalization applied to the kernel.
template <class Ops>
typename Ops::V wn_conv(Ops& ops, typename Ops::V x, const std::string& prefix, int pad) {
  auto w = ops.weight_norm(ops.param(prefix + ".v"), ops.param(prefix + ".g"));
  return ops.conv2d(x, w, ops.param(prefix + ".bias"), pad);
}

// x + conv3x3(relu(conv3x3(x))). No batch norm, no residual scaling.
template <class Ops>
typename Ops::V residual_block(Ops& ops, typename Ops::V x, const std::string& prefix) {
  auto t = wn_conv(ops, x, prefix + ".conv1", 1);
  t = ops.relu(t);
  t = wn_conv(ops, t, prefix + ".conv2", 1);
  return ops.add(x, t);
}

// Channel gate: pooled descriptor, single CxC map, sigmoid, rescale.
template <class Ops>
typename Ops::V lca_gate(Ops& ops, typename Ops::V u, const std::string& prefix) {
  auto z = ops.global_avg_pool(u);
  auto a = ops.sigmoid(ops.conv2d(z, ops.param(prefix + ".w"), std::nullopt, 0));
  return ops.mul_channelwise(u, a);
}

// Classic bottleneck gate: sigma(W2 relu(W1 z)).
template <class Ops>
typename Ops::V ca_gate(Ops& ops, typename Ops::V u, const std::string& prefix) {
  auto z = ops.global_avg_pool(u);
  auto m = ops.relu(ops.conv2d(z, ops.param(prefix + ".w1"), std::nullopt, 0));
  auto a = ops.sigmoid(ops.conv2d(m, ops.param(prefix + ".w2"), std::nullopt, 0));
  return ops.mul_channelwise(u, a);
}

// 1-d convolution over the channel descriptor, zero-padded.
template <class Ops>
typename Ops::V eca_gate(Ops& ops, typename Ops::V u, const std::string& prefix) {
  auto z = ops.global_avg_pool(u);
  auto a = ops.sigmoid(ops.conv1d_channels(z, ops.param(prefix + ".w")));
  return ops.mul_channelwise(u, a);
}

// Pixel attention: full (C,H,W) sigmoid mask from a 1x1 conv.
template <class Ops>
typename Ops::V pa_gate(Ops& ops, typename Ops::V u, const std::string& prefix) {
  auto m = ops.sigmoid(ops.conv2d(u, ops.param(prefix + ".w"), std::nullopt, 0));
  return ops.mul(u, m);
}

template <class Ops>
typename Ops::V attention_gate(Ops& ops, typename Ops::V u, AttentionKind kind,
                               const std::string& prefix) {
  switch (kind) {
    case AttentionKind::LCA: return lca_gate(ops, u, prefix);
    case AttentionKind::CA: return ca_gate(ops, u, prefix);
    case AttentionKind::ECA: return eca_gate(ops, u, prefix);
    case AttentionKind::PA: return pa_gate(ops, u, prefix);
    case AttentionKind::None: break;
  }
  throw ConfigError("attention_gate called with kind none");
}

// Sub-pixel head: expand C -> C*s^2, shuffle, map to RGB.
template <class Ops>
typename Ops::V upsampler_head(Ops& ops, typename Ops::V f, int scale) {
  auto e = wn_conv(ops, f, "head.convexpand", 1);
  auto u = ops.pixel_shuffle(e, scale);
  return wn_conv(ops, u, "head.convout", 1);
}

}  // namespace hran
