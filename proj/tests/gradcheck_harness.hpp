#pragma once
#include <functional>
#include <string>
#include <vector>

#include "hran/gradcheck.hpp"
#include "hran/layers.hpp"
#include "hran/rng.hpp"
#include "hran/tape.hpp"

namespace test_helpers {

// Finite-difference check of an arbitrary graph fragment. The fragment's
// output is contracted to a scalar with fixed pseudo-random weights so every
// output coordinate contributes.
inline hran::GradCheckReport check_graph(
    const std::function<int(hran::Tape<double>&, const std::vector<int>&)>& build,
    std::vector<hran::Tensor4<double>> inputs, double tol = 1e-4, double eps = 1e-5) {
  using namespace hran;
  std::vector<NamedParam> params;
  for (size_t i = 0; i < inputs.size(); ++i) {
    params.push_back({"in" + std::to_string(i), &inputs[i]});
  }
  auto run = [&](bool want_grads, std::vector<Tensor4<double>>* grads) {
    Tape<double> tape;
    std::vector<int> ids;
    for (auto& in : inputs) ids.push_back(tape.leaf(in));
    int out = build(tape, ids);
    Tensor4<double> weights(tape.value(out).shape());
    Rng wrng(99);
    for (int64_t i = 0; i < weights.numel(); ++i) weights[i] = wrng.uniform_real(-1.0, 1.0);
    int w = tape.leaf(weights);
    int loss = tape.sum(tape.mul(out, w));
    if (want_grads) {
      tape.backward(loss);
      for (int id : ids) grads->push_back(tape.grad(id));
    }
    return tape.value(loss)[0];
  };
  auto f = [&]() { return run(false, nullptr); };
  auto analytic = [&]() {
    std::vector<Tensor4<double>> grads;
    run(true, &grads);
    return grads;
  };
  return finite_diff_check(f, params, analytic, eps, tol);
}

// Same, for layer wiring that reads a parameter table: both the explicit
// inputs and every table entry are perturbed and verified.
inline hran::GradCheckReport check_layer(
    const std::function<int(hran::TapeOps<double>&, const std::vector<int>&)>& build,
    std::vector<hran::Tensor4<double>> inputs, hran::ParamTable<double>& table,
    double tol = 1e-4, double eps = 1e-5) {
  using namespace hran;
  std::vector<NamedParam> params;
  for (size_t i = 0; i < inputs.size(); ++i) {
    params.push_back({"in" + std::to_string(i), &inputs[i]});
  }
  for (const auto& name : table.names()) params.push_back({name, &table.at(name)});

  auto run = [&](bool want_grads, std::vector<Tensor4<double>>* grads) {
    Tape<double> tape;
    TapeOps<double> ops{&tape, &table, {}};
    std::vector<int> ids;
    for (auto& in : inputs) ids.push_back(tape.leaf(in));
    int out = build(ops, ids);
    Tensor4<double> weights(tape.value(out).shape());
    Rng wrng(99);
    for (int64_t i = 0; i < weights.numel(); ++i) weights[i] = wrng.uniform_real(-1.0, 1.0);
    int w = tape.leaf(weights);
    int loss = tape.sum(tape.mul(out, w));
    if (want_grads) {
      tape.backward(loss);
      for (int id : ids) grads->push_back(tape.grad(id));
      for (const auto& name : table.names()) {
        auto it = ops.leaf_ids.find(name);
        if (it != ops.leaf_ids.end()) {
          grads->push_back(tape.grad(it->second));
        } else {
          grads->push_back(Tensor4<double>(table.at(name).shape()));
        }
      }
    }
    return tape.value(loss)[0];
  };
  auto f = [&]() { return run(false, nullptr); };
  auto analytic = [&]() {
    std::vector<Tensor4<double>> grads;
    run(true, &grads);
    return grads;
  };
  return finite_diff_check(f, params, analytic, eps, tol);
}

}  // namespace test_helpers
