#pragma once
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "hran/tensor.hpp"

namespace hran {

// One differentiable parameter block exposed to the checker. The pointer
// stays owned by the caller; finite_diff_check perturbs it in place and
// restores every coordinate afterwards.
struct NamedParam {
  std::string name;
  Tensor4<double>* value;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  bool pass = false;
  std::string worst_param;
  int64_t worst_index = -1;
};

// Central-difference verification of analytic gradients, always in f64.
// f() evaluates the scalar objective at the current parameter values;
// analytic_grads() runs one forward+backward and returns gradients aligned
// with `params`. Relative error uses the finite-difference value as the
// reference, with an absolute floor of 1e-8 in the denominator.
inline GradCheckReport finite_diff_check(const std::function<double()>& f,
                                         std::span<const NamedParam> params,
                                         const std::function<std::vector<Tensor4<double>>()>&
                                             analytic_grads,
                                         double epsilon, double tolerance) {
  GradCheckReport report;
  const std::vector<Tensor4<double>> grads = analytic_grads();
  if (grads.size() != params.size()) {
    throw Error("finite_diff_check: analytic gradient count " + std::to_string(grads.size()) +
                " != parameter count " + std::to_string(params.size()));
  }
  for (size_t p = 0; p < params.size(); ++p) {
    Tensor4<double>& theta = *params[p].value;
    if (!(grads[p].shape() == theta.shape())) {
      throw ShapeError("finite_diff_check: gradient shape " + grads[p].shape().str() +
                       " != parameter " + params[p].name + " shape " + theta.shape().str());
    }
    for (int64_t i = 0; i < theta.numel(); ++i) {
      const double saved = theta[i];
      theta[i] = saved + epsilon;
      const double fplus = f();
      theta[i] = saved - epsilon;
      const double fminus = f();
      theta[i] = saved;
      if (!std::isfinite(fplus) || !std::isfinite(fminus)) {
        throw NonFiniteError("finite_diff_check: non-finite objective at " + params[p].name +
                             "[" + std::to_string(i) + "]");
      }
      const double fd = (fplus - fminus) / (2.0 * epsilon);
      const double an = grads[p][i];
      const double rel = std::abs(an - fd) / std::max(std::abs(fd), 1e-8);
      if (rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst_param = params[p].name;
        report.worst_index = i;
      }
    }
  }
  report.pass = report.max_rel_error <= tolerance;
  return report;
}

}  // namespace hran
