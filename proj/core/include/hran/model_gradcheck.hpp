#pragma once
#include "hran/gradcheck.hpp"
#include "hran/model.hpp"

namespace hran {

// Finite-difference verification of the full network in f64: random [0,1]
// input, random target, L1 objective, every named parameter checked.
GradCheckReport gradcheck_model(const ModelConfig& cfg, uint64_t seed, Shape4 input_shape,
                                double epsilon = 1e-5, double tolerance = 1e-4);

}  // namespace hran
