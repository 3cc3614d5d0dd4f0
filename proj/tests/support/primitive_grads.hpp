#pragma once

// Finite-difference checks of each differentiable primitive. Every check
// builds a scalar loss sum(R .* op(inputs)) with a fixed random R, fills the
// analytic gradients through the op's backward rule, and returns the
// grad_check report.

#include <map>
#include <string>

#include "dsner/crf.hpp"
#include "dsner/lstm.hpp"
#include "dsner/ops.hpp"
#include "dsner/optim.hpp"
#include "dsner/vocab.hpp"

namespace dsner::testing {

inline Parameter random_param(const std::string& name, Eigen::Index r, Eigen::Index c, Rng& rng,
                              double scale = 1.0) {
  return Parameter(name, uniform(r, c, scale, rng));
}

inline double weighted_sum(const Tensor& y, const Tensor& weights) {
  return y.cwiseProduct(weights).sum();
}

inline std::map<std::string, double> primitive_gradient_errors(std::uint64_t seed, double eps = 1e-6) {
  Rng rng(seed);
  std::map<std::string, double> out;

  {
    Parameter x = random_param("x", 3, 2, rng), w = random_param("W", 2, 4, rng),
              b = random_param("b", 1, 4, rng);
    const Tensor r = uniform(3, 4, 1.0, rng);
    Parameter* ps[] = {&x, &w, &b};
    for (Parameter* p : ps) p->zero_grad();
    x.grad = affine_backward(x.value, w.value, r, w.grad, b.grad);
    out["affine"] = grad_check([&] { return weighted_sum(affine(x.value, w.value, b.value), r); }, ps, eps)
                        .max_rel_error;
  }
  {
    Parameter x = random_param("x", 3, 4, rng, 2.0);
    const Tensor r = uniform(3, 4, 1.0, rng);
    Parameter* ps[] = {&x};
    x.grad = sigmoid_backward(sigmoid(x.value), r);
    out["sigmoid"] = grad_check([&] { return weighted_sum(sigmoid(x.value), r); }, ps, eps).max_rel_error;
    x.grad = tanh_backward(tanh_op(x.value), r);
    out["tanh"] = grad_check([&] { return weighted_sum(tanh_op(x.value), r); }, ps, eps).max_rel_error;
  }
  {
    Parameter a = random_param("a", 2, 3, rng), b = random_param("b", 2, 3, rng);
    const Tensor r = uniform(2, 3, 1.0, rng);
    Parameter* ps[] = {&a, &b};
    a.grad = r.cwiseProduct(b.value);
    b.grad = r.cwiseProduct(a.value);
    out["hadamard"] = grad_check([&] { return weighted_sum(hadamard(a.value, b.value), r); }, ps, eps)
                          .max_rel_error;
    a.grad = r;
    b.grad = r;
    out["add"] = grad_check([&] { return weighted_sum(add(a.value, b.value), r); }, ps, eps).max_rel_error;
  }
  for (int axis : {0, 1}) {
    Parameter a = random_param("a", 2, 3, rng);
    Parameter b = axis == 0 ? random_param("b", 4, 3, rng) : random_param("b", 2, 5, rng);
    const Tensor y = concat(a.value, b.value, axis);
    const Tensor r = uniform(y.rows(), y.cols(), 1.0, rng);
    Parameter* ps[] = {&a, &b};
    auto [da, db] = concat_backward(r, axis == 0 ? a.value.rows() : a.value.cols(), axis);
    a.grad = da;
    b.grad = db;
    out["concat_axis" + std::to_string(axis)] =
        grad_check([&] { return weighted_sum(concat(a.value, b.value, axis), r); }, ps, eps).max_rel_error;
  }
  {
    Parameter v = random_param("v", 1, 5, rng, 3.0);
    Parameter* ps[] = {&v};
    // d lse / dv = softmax(v)
    v.grad = (v.value.array() - log_sum_exp(v.value)).exp().matrix();
    out["log_sum_exp"] = grad_check([&] { return log_sum_exp(v.value); }, ps, eps).max_rel_error;
  }
  {
    Parameter x = random_param("x", 4, 5, rng);
    const Tensor r = uniform(4, 5, 1.0, rng);
    Parameter* ps[] = {&x};
    auto masked = [&] {
      Rng fixed(seed + 99);
      return dropout(x.value, 0.5, true, fixed);
    };
    x.grad = dropout_backward(masked().mask, r);
    out["dropout"] = grad_check([&] { return weighted_sum(masked().output, r); }, ps, eps).max_rel_error;
  }
  {
    Parameter table("table", uniform(5, 3, 1.0, rng));
    EmbeddingMatrix m{table, true};
    const std::vector<int> ids{1, 3, 3, 0, 4};
    const Tensor r = uniform(5, 3, 1.0, rng);
    Parameter* ps[] = {&m.table};
    m.table.zero_grad();
    lookup_backward(m, ids, r);
    out["lookup"] = grad_check([&] { return weighted_sum(lookup(m, ids), r); }, ps, eps).max_rel_error;
  }
  return out;
}

// Gradient of sum(R .* h') for one LSTM cell step, against every weight,
// the input and the previous state.
inline double lstm_cell_gradient_error(std::uint64_t seed, double eps = 1e-6) {
  Rng rng(seed);
  LstmWeights w = LstmWeights::init("cell", 3, 2, rng);
  w.bias.value = uniform(1, 8, 0.5, rng);
  Parameter x = random_param("x", 1, 3, rng), h = random_param("h", 1, 2, rng),
            c = random_param("c", 1, 2, rng);
  const Tensor r = uniform(1, 2, 1.0, rng);
  auto loss = [&] {
    const LstmState s = lstm_cell_step(x.value, {h.value, c.value}, w);
    return weighted_sum(s.h, r);
  };
  for (Parameter* p : w.parameters()) p->zero_grad();
  // One-step run with the previous state as the initial state.
  LstmTrace trace;
  lstm_run(x.value, w, {h.value, c.value}, &trace);
  x.grad = lstm_backward(trace, w, r);
  std::vector<Parameter*> ps = w.parameters();
  ps.push_back(&x);
  return grad_check(loss, ps, eps).max_rel_error;
}

// Gradients of a Bi-LSTM sequence run (sum(R .* out)) against all weights
// and the input sequence.
inline double bilstm_gradient_error(std::uint64_t seed, double eps = 1e-6) {
  Rng rng(seed);
  BiLstmLayer layer = BiLstmLayer::init("bi", 3, 2, rng);
  Parameter x = random_param("x", 4, 3, rng);
  const Tensor r = uniform(4, 4, 1.0, rng);
  for (Parameter* p : layer.parameters()) p->zero_grad();
  BiLstmTrace trace;
  bilstm_run(x.value, layer, &trace);
  x.grad = bilstm_backward(trace, layer, r);
  std::vector<Parameter*> ps = layer.parameters();
  ps.push_back(&x);
  return grad_check([&] { return weighted_sum(bilstm_run(x.value, layer), r); }, ps, eps).max_rel_error;
}

// CRF NLL gradient with respect to emissions and all CRF parameters.
inline double crf_gradient_error(std::uint64_t seed, double eps = 1e-6) {
  Rng rng(seed);
  CrfParams crf = CrfParams::zeros(3);
  for (Parameter* p : crf.parameters()) p->value = uniform(p->value.rows(), p->value.cols(), 1.0, rng);
  Parameter em = random_param("emissions", 4, 3, rng, 2.0);
  const std::vector<int> tags{0, 1, 2, 0};
  for (Parameter* p : crf.parameters()) p->zero_grad();
  nll_loss_backward(em.value, tags, crf, em.grad);
  std::vector<Parameter*> ps = crf.parameters();
  ps.push_back(&em);
  return grad_check([&] { return nll_loss(em.value, tags, crf); }, ps, eps).max_rel_error;
}

}  // namespace dsner::testing
