#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hran/layers.hpp"
#include "gradcheck_harness.hpp"
#include "helpers.hpp"
#include "oracle/naive_ops.hpp"

using namespace hran;
using test_helpers::check_layer;
using test_helpers::max_abs_diff;
using test_helpers::random_tensor;

namespace {

template <typename T>
ParamTable<T> make_rb_params(Rng& rng, int64_t C) {
  ParamTable<T> p;
  init_wn_conv(p, rng, "rb.conv1", C, C, 3);
  init_wn_conv(p, rng, "rb.conv2", C, C, 3);
  return p;
}

}  // namespace

TEST_CASE("param table: unique names, order, totals") {
  ParamTable<float> p;
  p.add("a", {2, 3, 1, 1});
  p.add("b", {1, 4, 1, 1});
  CHECK_THROWS_AS(p.add("a", {1, 1, 1, 1}), Error);
  CHECK(p.names() == std::vector<std::string>{"a", "b"});
  CHECK(p.total_scalars() == 10);
  CHECK_THROWS_AS(p.at("missing"), Error);
}

TEST_CASE("residual block: zero branch is the identity") {
  Rng rng(11);
  auto p = make_rb_params<float>(rng, 3);
  test_helpers::zero_effective(p);
  auto x = random_tensor<float>({1, 3, 5, 5}, rng);
  EagerOps<float> ops{&p};
  auto y = residual_block(ops, ops.input(x), "rb");
  CHECK(*y == x);
}

TEST_CASE("residual block: zero input reduces to the bias chain") {
  // x = 0 so the block output is conv2(relu(bias1)) + 0, constant per channel
  Rng rng(12);
  auto p = make_rb_params<double>(rng, 1);
  auto x = Tensor4<double>::zeros({1, 1, 4, 4});
  EagerOps<double> ops{&p};
  auto y = residual_block(ops, ops.input(x), "rb");

  const double b1 = p.at("rb.conv1.bias")[0];
  const double b2 = p.at("rb.conv2.bias")[0];
  const double r = std::max(b1, 0.0);
  // interior pixels see the full 3x3 kernel sum
  const Tensor4<double> w2 = oracle::weight_norm(p.at("rb.conv2.v"), p.at("rb.conv2.g"));
  double wsum = 0.0;
  for (int64_t i = 0; i < w2.numel(); ++i) wsum += w2[i];
  CHECK(y->at(0, 0, 1, 1) == doctest::Approx(b2 + r * wsum).epsilon(1e-12));
  CHECK(y->at(0, 0, 2, 2) == doctest::Approx(b2 + r * wsum).epsilon(1e-12));
}

TEST_CASE("residual block gradient check") {
  Rng rng(13);
  auto p = make_rb_params<double>(rng, 2);
  auto x = random_tensor<double>({1, 2, 4, 4}, rng);
  auto rep = check_layer(
      [&](TapeOps<double>& ops, const std::vector<int>& in) {
        return residual_block(ops, in[0], "rb");
      },
      {x}, p);
  CHECK(rep.pass);
}

TEST_CASE("lca: zero weights halve exactly, closed form matches") {
  const int64_t C = 2;
  ParamTable<float> p;
  p.add("lca.w", {C, C, 1, 1});  // zero
  Rng rng(14);
  auto u = random_tensor<float>({1, C, 3, 3}, rng);
  EagerOps<float> ops{&p};
  auto half = lca_gate(ops, ops.input(u), "lca");
  for (int64_t i = 0; i < u.numel(); ++i) CHECK(half->operator[](i) == 0.5f * u[i]);

  // identity weights, channels constant at +2 / -2
  ParamTable<double> pw;
  auto& w = pw.add("lca.w", {C, C, 1, 1});
  w.at(0, 0, 0, 0) = 1.0;
  w.at(1, 1, 0, 0) = 1.0;
  Tensor4<double> u2({1, C, 2, 2});
  for (int64_t i = 0; i < 4; ++i) u2[i] = 2.0;
  for (int64_t i = 4; i < 8; ++i) u2[i] = -2.0;
  EagerOps<double> ops2{&pw};
  auto out = lca_gate(ops2, ops2.input(u2), "lca");
  CHECK(out->at(0, 0, 0, 0) == doctest::Approx(1.76159416).epsilon(1e-8));
  CHECK(out->at(0, 1, 0, 0) == doctest::Approx(-0.23840584).epsilon(1e-8));
  // alpha = sigmoid([2, -2])
  CHECK(out->at(0, 0, 1, 1) / 2.0 == doctest::Approx(0.88079708).epsilon(1e-8));
  CHECK(out->at(0, 1, 1, 1) / -2.0 == doctest::Approx(0.11920292).epsilon(1e-8));
}

TEST_CASE("lca: attenuation property, 0 < alpha < 1") {
  Rng rng(15);
  const int64_t C = 4;
  ParamTable<float> p;
  p.add("lca.w", {C, C, 1, 1}) = random_tensor<float>({C, C, 1, 1}, rng);
  auto u = random_tensor<float>({2, C, 3, 3}, rng);
  EagerOps<float> ops{&p};
  auto out = lca_gate(ops, ops.input(u), "lca");
  for (int64_t i = 0; i < u.numel(); ++i) {
    if (u[i] != 0.0f) CHECK(std::abs((*out)[i]) < std::abs(u[i]));
  }
}

TEST_CASE("lca rejects wrong weight shape") {
  ParamTable<float> p;
  p.add("lca.w", {3, 2, 1, 1});
  Rng rng(16);
  auto u = random_tensor<float>({1, 3, 2, 2}, rng);
  EagerOps<float> ops{&p};
  CHECK_THROWS_AS(lca_gate(ops, ops.input(u), "lca"), ShapeError);
}

TEST_CASE("attention variants: zero params gives the 0.5 gate") {
  Rng rng(17);
  const int64_t C = 8;
  AttentionHyper hyper{static_cast<int>(C), 4, 3};
  auto u = random_tensor<float>({1, C, 3, 3}, rng);
  for (AttentionKind kind :
       {AttentionKind::LCA, AttentionKind::CA, AttentionKind::ECA, AttentionKind::PA}) {
    ParamTable<float> p;
    init_attention(p, "att", kind, hyper);
    EagerOps<float> ops{&p};
    auto out = attention_gate(ops, ops.input(u), kind, "att");
    for (int64_t i = 0; i < u.numel(); ++i) {
      CHECK((*out)[i] == doctest::Approx(0.5f * u[i]).epsilon(1e-7));
    }
  }
}

TEST_CASE("eca: center tap feeds the first channel under a delta descriptor") {
  // z = [1, 0, 0, 0]: with zero padding the first output sees only w[1]
  ParamTable<double> p;
  auto& w = p.add("att.w", {1, 1, 1, 3});
  w[0] = 0.7;
  w[1] = -0.3;
  w[2] = 0.9;
  Tensor4<double> z({1, 4, 1, 1});
  z[0] = 1.0;
  auto a = kernels::conv1d_channels_forward(z, w);
  CHECK(a.at(0, 0, 0, 0) == doctest::Approx(-0.3));  // center tap
  CHECK(a.at(0, 1, 0, 0) == doctest::Approx(0.7));   // left tap sees z[0]
  CHECK(a.at(0, 2, 0, 0) == 0.0);
}

TEST_CASE("ca: reduction must divide channels; full reduction still works") {
  AttentionHyper bad{6, 4, 3};
  ParamTable<double> p;
  CHECK_THROWS_AS(init_attention(p, "att", AttentionKind::CA, bad), ConfigError);

  // r = C gives bottleneck width 1 and still gradient-checks
  const int64_t C = 4;
  AttentionHyper hyper{static_cast<int>(C), static_cast<int>(C), 3};
  ParamTable<double> pc;
  init_attention(pc, "att", AttentionKind::CA, hyper);
  Rng rng(18);
  pc.at("att.w1") = random_tensor<double>({1, C, 1, 1}, rng);
  pc.at("att.w2") = random_tensor<double>({C, 1, 1, 1}, rng);
  auto u = random_tensor<double>({1, C, 3, 3}, rng);
  auto rep = check_layer(
      [&](TapeOps<double>& ops, const std::vector<int>& in) { return ca_gate(ops, in[0], "att"); },
      {u}, pc);
  CHECK(rep.pass);
}

TEST_CASE("attention variants gradient-check") {
  Rng rng(19);
  const int64_t C = 4;
  AttentionHyper hyper{static_cast<int>(C), 2, 3};
  auto u = random_tensor<double>({1, C, 4, 4}, rng);
  for (AttentionKind kind :
       {AttentionKind::LCA, AttentionKind::CA, AttentionKind::ECA, AttentionKind::PA}) {
    ParamTable<double> p;
    init_attention(p, "att", kind, hyper);
    for (const auto& name : p.names()) {
      p.at(name) = random_tensor<double>(p.at(name).shape(), rng);
    }
    auto rep = check_layer(
        [&](TapeOps<double>& ops, const std::vector<int>& in) {
          return attention_gate(ops, in[0], kind, "att");
        },
        {u}, p);
    INFO("kind ", attention_name(kind), " max_rel_error ", rep.max_rel_error);
    CHECK(rep.pass);
  }
}

TEST_CASE("weight norm: identity at unit norm, scale invariance, zero-norm error") {
  Rng rng(20);
  auto v = random_tensor<double>({2, 3, 3, 3}, rng);
  // normalize each output channel to unit norm
  for (int64_t oc = 0; oc < 2; ++oc) {
    double sq = 0.0;
    for (int64_t i = 0; i < 27; ++i) sq += v[oc * 27 + i] * v[oc * 27 + i];
    for (int64_t i = 0; i < 27; ++i) v[oc * 27 + i] /= std::sqrt(sq);
  }
  auto g = Tensor4<double>::full({1, 2, 1, 1}, 1.0);
  auto w = kernels::weight_norm_forward(v, g);
  CHECK(max_abs_diff(w, v) < 1e-15);

  // scaling v by lambda > 0 leaves the effective kernel unchanged
  auto v2 = v;
  for (int64_t i = 0; i < v2.numel(); ++i) v2[i] *= 3.7;
  auto w2 = kernels::weight_norm_forward(v2, g);
  CHECK(max_abs_diff(w2, w) < 1e-14);

  CHECK_THROWS_AS(kernels::weight_norm_forward(Tensor4<double>::zeros({2, 3, 3, 3}), g),
                  NonFiniteError);
}

TEST_CASE("weight-normalized conv gradient-checks through (g, v, bias)") {
  Rng rng(21);
  ParamTable<double> p;
  init_wn_conv(p, rng, "c", 3, 2, 3);
  auto x = random_tensor<double>({1, 2, 4, 4}, rng);
  auto rep = check_layer(
      [&](TapeOps<double>& ops, const std::vector<int>& in) { return wn_conv(ops, in[0], "c", 1); },
      {x}, p);
  CHECK(rep.pass);
}

TEST_CASE("init: g equals the initial direction norm, biases zero") {
  Rng rng(22);
  ParamTable<float> p;
  init_wn_conv(p, rng, "c", 4, 3, 3);
  const auto w = kernels::weight_norm_forward(p.at("c.v"), p.at("c.g"));
  CHECK(max_abs_diff(w, p.at("c.v")) < 1e-6);
  for (int64_t i = 0; i < 4; ++i) CHECK(p.at("c.bias")[i] == 0.0f);
}

TEST_CASE("upsampler head: shape contract and gradient check") {
  Rng rng(23);
  const int64_t C = 4;
  for (auto [h, w, s, oh, ow] : {std::tuple{8, 8, 2, 16, 16}, std::tuple{10, 7, 3, 30, 21}}) {
    ParamTable<float> p;
    init_wn_conv(p, rng, "head.convexpand", C * s * s, C, 3);
    init_wn_conv(p, rng, "head.convout", 3, C, 3);
    auto f = random_tensor<float>({1, C, h, w}, rng);
    EagerOps<float> ops{&p};
    auto y = upsampler_head(ops, ops.input(f), s);
    CHECK(y->shape() == Shape4{1, 3, oh, ow});
  }

  ParamTable<double> p;
  init_wn_conv(p, rng, "head.convexpand", C * 4, C, 3);
  init_wn_conv(p, rng, "head.convout", 3, C, 3);
  auto f = random_tensor<double>({1, C, 3, 3}, rng);
  auto rep = check_layer(
      [&](TapeOps<double>& ops, const std::vector<int>& in) {
        return upsampler_head(ops, in[0], 2);
      },
      {f}, p);
  CHECK(rep.pass);
}

TEST_CASE("attention parameter counts: LCA C^2, CA 2C^2/r") {
  for (int64_t C : {16, 32, 64}) {
    AttentionHyper hyper{static_cast<int>(C), 16, 3};
    ParamTable<float> lca, ca, eca, pa;
    init_attention(lca, "a", AttentionKind::LCA, hyper);
    init_attention(ca, "a", AttentionKind::CA, hyper);
    init_attention(eca, "a", AttentionKind::ECA, hyper);
    init_attention(pa, "a", AttentionKind::PA, hyper);
    CHECK(lca.total_scalars() == C * C);
    CHECK(ca.total_scalars() == 2 * C * C / 16);
    CHECK(eca.total_scalars() == 3);
    CHECK(pa.total_scalars() == C * C);
    CHECK(lca.total_scalars() > ca.total_scalars());  // r > 2
  }
}
