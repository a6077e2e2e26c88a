#pragma once
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>

#include "hran/layers.hpp"

namespace hran {

// base_lr * 0.5^floor(iteration / halve_every)
inline double lr_at(int64_t iteration, double base_lr, int64_t halve_every) {
  if (iteration < 0) throw ConfigError("lr_at: iteration must be >= 0");
  return base_lr * std::pow(0.5, static_cast<double>(iteration / halve_every));
}

template <typename T>
struct AdamState {
  T beta1 = T(0.9);
  T beta2 = T(0.999);
  T eps = T(1e-8);
  int64_t t = 0;           // completed steps
  ParamTable<T> m, v;      // moment buffers, mirror parameter shapes

  explicit AdamState(const ParamTable<T>& params) {
    for (const auto& name : params.names()) {
      m.add(name, params.at(name).shape());
      v.add(name, params.at(name).shape());
    }
  }

  // One update over every parameter; grads(name) supplies the gradient
  // tensor. Aborts on a non-finite gradient, naming the parameter.
  void step(ParamTable<T>& params,
            const std::function<const Tensor4<T>&(const std::string&)>& grads, T lr) {
    ++t;
    const T bc1 = T(1) - std::pow(beta1, static_cast<T>(t));
    const T bc2 = T(1) - std::pow(beta2, static_cast<T>(t));
    for (const auto& name : params.names()) {
      const Tensor4<T>& g = grads(name);
      Tensor4<T>& p = params.at(name);
      if (!(g.shape() == p.shape())) {
        throw ShapeError("adam_step: gradient shape " + g.shape().str() + " != parameter " +
                         name + " shape " + p.shape().str());
      }
      if (!g.all_finite()) {
        throw NonFiniteError("adam_step: non-finite gradient for parameter " + name);
      }
      Tensor4<T>& mt = m.at(name);
      Tensor4<T>& vt = v.at(name);
      for (int64_t i = 0; i < p.numel(); ++i) {
        mt[i] = beta1 * mt[i] + (T(1) - beta1) * g[i];
        vt[i] = beta2 * vt[i] + (T(1) - beta2) * g[i] * g[i];
        const T mhat = mt[i] / bc1;
        const T vhat = vt[i] / bc2;
        p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
      }
    }
  }
};

}  // namespace hran
