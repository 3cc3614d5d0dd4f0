#pragma once

#include <cstdint>

#include "dsner/model.hpp"
#include "dsner/optim.hpp"

namespace dsner {

struct ModelGradCheckOptions {
  std::uint64_t seed = 3;
  double eps = 1e-5;
  int encoder_layers = 2;
  // Test hook: perturbs one analytic gradient entry before comparison.
  bool corrupt = false;
};

// Builds a tiny randomly initialized model, takes the CRF NLL of a 3-token
// sentence with dropout off, and compares every parameter gradient against
// central differences.
GradCheckReport model_gradient_check(const ModelGradCheckOptions& options);

// The model and sentence used by model_gradient_check.
Model tiny_model(std::uint64_t seed, int encoder_layers = 2);
Sentence tiny_sentence();

}  // namespace dsner
