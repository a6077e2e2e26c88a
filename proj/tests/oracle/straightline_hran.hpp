#pragma once
// Straight-line re-evaluation of the full network from a parameter table,
// built exclusively on the naive oracle ops. Supports parallel-LCA models
// with banks enabled (the configuration the equivalence checks use).
#include <string>
#include <vector>

#include "hran/layers.hpp"
#include "hran/model.hpp"
#include "oracle/naive_ops.hpp"

namespace oracle {

template <typename T>
Tensor4<T> wn_conv3(const hran::ParamTable<T>& p, const std::string& prefix,
                    const Tensor4<T>& x, int pad) {
  const Tensor4<T> w = weight_norm(p.at(prefix + ".v"), p.at(prefix + ".g"));
  const Tensor4<T> b = p.at(prefix + ".bias");
  return conv2d(x, w, &b, pad);
}

template <typename T>
Tensor4<T> lca(const hran::ParamTable<T>& p, const std::string& wname, const Tensor4<T>& u) {
  const Tensor4<T> z = global_avg_pool(u);
  const Tensor4<T> a = sigmoid(conv2d(z, p.at(wname), static_cast<const Tensor4<T>*>(nullptr), 0));
  return scale_channels(u, a);
}

template <typename T>
Tensor4<T> straightline_forward(const hran::ModelConfig& cfg, const hran::ParamTable<T>& p,
                                const Tensor4<T>& input) {
  if (cfg.attention != hran::AttentionKind::LCA ||
      cfg.placement != hran::AttentionPlacement::Parallel || !cfg.banks_enabled) {
    throw hran::Error("straightline_forward only covers parallel-LCA banks-on configs");
  }
  const Tensor4<T> f0 = wn_conv3(p, "head.conv0", input, 1);

  Tensor4<T> x = f0;
  std::vector<Tensor4<T>> fbanks, abanks;
  for (int i = 0; i < cfg.num_rafgs; ++i) {
    const std::string rp = "rafg" + std::to_string(i);
    Tensor4<T> h = x;
    std::vector<Tensor4<T>> rb_outs, att_outs;
    for (int j = 0; j < cfg.blocks_per_rafg; ++j) {
      const std::string bp = rp + ".rb" + std::to_string(j);
      Tensor4<T> t = wn_conv3(p, bp + ".conv1", h, 1);
      t = relu(t);
      t = wn_conv3(p, bp + ".conv2", t, 1);
      h = add(h, t);
      rb_outs.push_back(h);
      att_outs.push_back(lca(p, rp + ".lca" + std::to_string(j) + ".w", h));
    }
    const Tensor4<T> fb = wn_conv3(p, rp + ".fbank.conv", concat_channels(rb_outs), 0);
    Tensor4<T> ab = wn_conv3(p, rp + ".abank.conv", concat_channels(att_outs), 0);
    ab = lca(p, rp + ".abank.lca.w", ab);
    fbanks.push_back(fb);
    abanks.push_back(ab);
    x = add(fb, ab);
  }

  const Tensor4<T> gf = wn_conv3(p, "global.fbank.conv", concat_channels(fbanks), 0);
  Tensor4<T> ga = wn_conv3(p, "global.abank.conv", concat_channels(abanks), 0);
  ga = lca(p, "global.abank.lca.w", ga);
  const Tensor4<T> trunk = add(add(gf, ga), f0);

  const Tensor4<T> e = wn_conv3(p, "head.convexpand", trunk, 1);
  const Tensor4<T> up = pixel_shuffle(e, cfg.scale);
  return wn_conv3(p, "head.convout", up, 1);
}

}  // namespace oracle
