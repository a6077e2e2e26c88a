#pragma once
#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hran/layers.hpp"

namespace hran {

// Architecture hyperparameters. `channels` defaults to 48, which puts the
// x4 model at ~0.80M parameters and keeps the width divisible by the CA
// reduction ratio.
struct ModelConfig {
  int num_rafgs = 3;
  int blocks_per_rafg = 3;
  int channels = 48;
  int scale = 4;
  AttentionKind attention = AttentionKind::LCA;
  AttentionPlacement placement = AttentionPlacement::Parallel;
  bool banks_enabled = true;
  int ca_reduction = 16;
  int eca_kernel = 3;

  void validate() const {
    if (num_rafgs < 1) throw ConfigError("num_rafgs must be >= 1");
    if (blocks_per_rafg < 1) throw ConfigError("blocks_per_rafg must be >= 1");
    if (channels < 1) throw ConfigError("channels must be >= 1");
    if (scale != 2 && scale != 3 && scale != 4) {
      throw ConfigError("scale must be one of {2, 3, 4}, got " + std::to_string(scale));
    }
    if (placement == AttentionPlacement::InPlace && attention == AttentionKind::None) {
      throw ConfigError("in_place placement requires an attention kind");
    }
  }

  bool operator==(const ModelConfig&) const = default;
};

// Intermediate values captured during a forward pass; V is the executor's
// value handle (tape node id or tensor pointer).
template <typename V>
struct ForwardTrace {
  struct Rafg {
    std::vector<V> rb_outs;
    std::vector<V> att_outs;
    V fbank{};
    V abank{};
    V out{};
  };
  V f0{};
  std::vector<Rafg> rafgs;
  V trunk{};
  V output{};
};

template <typename T>
class HranModel {
 public:
  HranModel(const ModelConfig& cfg, uint64_t seed) : cfg_(cfg) {
    cfg_.validate();
    Rng rng(seed);
    register_params(rng);
  }

  // Rebuild around an existing parameter table (checkpoint load). The table
  // must carry exactly the names this config registers.
  static HranModel from_params(const ModelConfig& cfg, ParamTable<T> table) {
    HranModel m(cfg, 0);
    if (table.names().size() != m.params_.names().size()) {
      throw NameSetError("parameter table has " + std::to_string(table.names().size()) +
                         " tensors, model expects " + std::to_string(m.params_.names().size()));
    }
    for (const auto& name : m.params_.names()) {
      if (!table.has(name)) throw NameSetError("parameter table is missing tensor " + name);
      if (!(table.at(name).shape() == m.params_.at(name).shape())) {
        throw ShapeError("parameter " + name + ": shape " + table.at(name).shape().str() +
                         " does not match model shape " + m.params_.at(name).shape().str());
      }
    }
    m.params_ = std::move(table);
    return m;
  }

  const ModelConfig& config() const { return cfg_; }
  ParamTable<T>& params() { return params_; }
  const ParamTable<T>& params() const { return params_; }

  // Wires the whole network on the given executor and returns the SR output
  // handle. Output spatial size is exactly (scale*h, scale*w); no clamping.
  template <class Ops>
  typename Ops::V forward(Ops& ops, typename Ops::V input,
                          ForwardTrace<typename Ops::V>* trace = nullptr) const {
    using V = typename Ops::V;
    const int B = cfg_.blocks_per_rafg;
    const bool parallel_att =
        cfg_.attention != AttentionKind::None && cfg_.placement == AttentionPlacement::Parallel;
    const bool plain_resnet = cfg_.attention == AttentionKind::None && !cfg_.banks_enabled;
    const std::string att = attention_name(cfg_.attention);

    V f0 = wn_conv(ops, input, "head.conv0", 1);
    if (trace) trace->f0 = f0;

    V x = f0;
    std::vector<V> fbank_outs, abank_outs;
    for (int i = 0; i < cfg_.num_rafgs; ++i) {
      const std::string rp = "rafg" + std::to_string(i);
      typename ForwardTrace<V>::Rafg rt;
      std::vector<V> rb_outs, att_outs;
      V h = x;
      for (int j = 0; j < B; ++j) {
        const std::string bp = rp + ".rb" + std::to_string(j);
        if (cfg_.placement == AttentionPlacement::InPlace &&
            cfg_.attention != AttentionKind::None) {
          // gate the residual branch before the skip addition
          auto t = wn_conv(ops, h, bp + ".conv1", 1);
          t = ops.relu(t);
          t = wn_conv(ops, t, bp + ".conv2", 1);
          t = attention_gate(ops, t, cfg_.attention, rp + "." + att + std::to_string(j));
          h = ops.add(h, t);
        } else {
          h = residual_block(ops, h, bp);
        }
        rb_outs.push_back(h);
        if (parallel_att) {
          att_outs.push_back(
              attention_gate(ops, h, cfg_.attention, rp + "." + att + std::to_string(j)));
        }
      }

      V out;
      if (plain_resnet) {
        out = h;
      } else {
        V fb = ops.conv2d(ops.concat(rb_outs),
                          ops.weight_norm(ops.param(rp + ".fbank.conv.v"),
                                          ops.param(rp + ".fbank.conv.g")),
                          ops.param(rp + ".fbank.conv.bias"), 0);
        rt.fbank = fb;
        fbank_outs.push_back(fb);
        if (parallel_att) {
          V ab = ops.conv2d(ops.concat(att_outs),
                            ops.weight_norm(ops.param(rp + ".abank.conv.v"),
                                            ops.param(rp + ".abank.conv.g")),
                            ops.param(rp + ".abank.conv.bias"), 0);
          ab = attention_gate(ops, ab, cfg_.attention, rp + ".abank." + att);
          rt.abank = ab;
          abank_outs.push_back(ab);
          out = ops.add(fb, ab);
        } else {
          out = fb;
        }
      }
      if (trace) {
        rt.rb_outs = std::move(rb_outs);
        rt.att_outs = std::move(att_outs);
        rt.out = out;
        trace->rafgs.push_back(std::move(rt));
      }
      x = out;
    }

    V trunk;
    if (plain_resnet || !cfg_.banks_enabled) {
      trunk = ops.add(x, f0);
    } else {
      V gf = ops.conv2d(ops.concat(fbank_outs),
                        ops.weight_norm(ops.param("global.fbank.conv.v"),
                                        ops.param("global.fbank.conv.g")),
                        ops.param("global.fbank.conv.bias"), 0);
      if (parallel_att) {
        V ga = ops.conv2d(ops.concat(abank_outs),
                          ops.weight_norm(ops.param("global.abank.conv.v"),
                                          ops.param("global.abank.conv.g")),
                          ops.param("global.abank.conv.bias"), 0);
        ga = attention_gate(ops, ga, cfg_.attention, "global.abank." + att);
        trunk = ops.add(ops.add(gf, ga), f0);
      } else {
        trunk = ops.add(gf, f0);
      }
    }
    if (trace) trace->trunk = trunk;

    V out = upsampler_head(ops, trunk, cfg_.scale);
    if (trace) trace->output = out;
    return out;
  }

  // Eager forward for inference. Clamps to [0,1] when requested.
  Tensor4<T> infer(const Tensor4<T>& input, bool clamp01,
                   ForwardTrace<typename EagerOps<T>::V>* trace = nullptr) const {
    if (input.shape().c != 3) {
      throw ShapeError("hran_forward: input must have 3 channels, got " + input.shape().str());
    }
    require_finite(input, "hran_forward input");
    EagerOps<T> ops{&params_};
    auto out_v = forward(ops, ops.input(input), trace);
    Tensor4<T> out = *out_v;
    if (clamp01) {
      for (int64_t i = 0; i < out.numel(); ++i) out[i] = std::clamp(out[i], T(0), T(1));
    }
    return out;
  }

 private:
  void register_params(Rng& rng) {
    const int64_t C = cfg_.channels;
    const int B = cfg_.blocks_per_rafg;
    const bool parallel_att =
        cfg_.attention != AttentionKind::None && cfg_.placement == AttentionPlacement::Parallel;
    const bool plain_resnet = cfg_.attention == AttentionKind::None && !cfg_.banks_enabled;
    const AttentionHyper hyper{cfg_.channels, cfg_.ca_reduction, cfg_.eca_kernel};
    const std::string att = attention_name(cfg_.attention);

    init_wn_conv(params_, rng, "head.conv0", C, 3, 3);
    for (int i = 0; i < cfg_.num_rafgs; ++i) {
      const std::string rp = "rafg" + std::to_string(i);
      for (int j = 0; j < B; ++j) {
        init_wn_conv(params_, rng, rp + ".rb" + std::to_string(j) + ".conv1", C, C, 3);
        init_wn_conv(params_, rng, rp + ".rb" + std::to_string(j) + ".conv2", C, C, 3);
        if (cfg_.attention != AttentionKind::None) {
          init_attention(params_, rp + "." + att + std::to_string(j), cfg_.attention, hyper);
        }
      }
      if (!plain_resnet) {
        init_wn_conv(params_, rng, rp + ".fbank.conv", C, int64_t(B) * C, 1);
        if (parallel_att) {
          init_wn_conv(params_, rng, rp + ".abank.conv", C, int64_t(B) * C, 1);
          init_attention(params_, rp + ".abank." + att, cfg_.attention, hyper);
        }
      }
    }
    if (cfg_.banks_enabled && !plain_resnet) {
      init_wn_conv(params_, rng, "global.fbank.conv", C, int64_t(cfg_.num_rafgs) * C, 1);
      if (parallel_att) {
        init_wn_conv(params_, rng, "global.abank.conv", C, int64_t(cfg_.num_rafgs) * C, 1);
        init_attention(params_, "global.abank." + att, cfg_.attention, hyper);
      }
    }
    init_wn_conv(params_, rng, "head.convexpand", C * int64_t(cfg_.scale) * cfg_.scale, C, 3);
    init_wn_conv(params_, rng, "head.convout", 3, C, 3);
  }

  ModelConfig cfg_;
  ParamTable<T> params_;
};

template <typename T>
HranModel<T> build_variant(const ModelConfig& cfg, uint64_t seed) {
  return HranModel<T>(cfg, seed);
}

struct ParamCount {
  int64_t total = 0;
  std::vector<std::pair<std::string, int64_t>> per_tensor;  // registration order
};

template <typename T>
ParamCount count_params(const HranModel<T>& model) {
  ParamCount pc;
  for (const auto& name : model.params().names()) {
    const int64_t n = model.params().at(name).numel();
    pc.per_tensor.emplace_back(name, n);
    pc.total += n;
  }
  return pc;
}

}  // namespace hran
