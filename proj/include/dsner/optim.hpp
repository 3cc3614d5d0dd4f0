#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dsner/tensor.hpp"

namespace dsner {

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  long step = 0;
  std::vector<Tensor> m;
  std::vector<Tensor> v;
};

// One Adam step with bias correction. L2 enters as g <- g + l2 * theta on
// parameters with `decay` set. Row-sparse parameters update (and decay) only
// rows whose gradient is nonzero; a frozen row never moves. Throws
// NumericError naming the parameter if any gradient is non-finite.
void adam_step(std::span<Parameter* const> params, AdamState& state, double lr, double l2);

// Rescales all gradients so their joint L2 norm is at most max_norm. Returns
// the norm before clipping.
double clip_grad_norm(std::span<Parameter* const> params, double max_norm);

void zero_grads(std::span<Parameter* const> params);

struct GradCheckEntry {
  std::string name;
  double max_rel_error = 0;
  double max_abs_analytic = 0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double max_rel_error = 0;
};

// Compares the gradients already stored in `params` against central
// differences (f(p + eps) - f(p - eps)) / (2 eps) of `loss`, elementwise.
// Relative error is |a - n| / max(1e-8, |a| + |n|). Parameter values are
// restored afterwards.
GradCheckReport grad_check(const std::function<double()>& loss,
                           std::span<Parameter* const> params, double eps);

}  // namespace dsner
