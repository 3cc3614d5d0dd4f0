#pragma once

// Differentiable primitives. Every forward op has a matching *_backward that
// maps the upstream gradient onto its inputs; backward functions accumulate
// into parameter gradients with +=.

#include <span>
#include <vector>

#include "dsner/tensor.hpp"

namespace dsner {

template <typename Derived>
auto sigmoid(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  return MatrixX<Scalar>(
      x.unaryExpr([](Scalar v) { return Scalar(1) / (Scalar(1) + std::exp(-v)); }));
}

template <typename Derived>
auto tanh_op(const Eigen::MatrixBase<Derived>& x) {
  return MatrixX<typename Derived::Scalar>(x.array().tanh().matrix());
}

// Gradients expressed through the forward output y.
template <typename Y, typename G>
auto sigmoid_backward(const Eigen::MatrixBase<Y>& y, const Eigen::MatrixBase<G>& dy) {
  return MatrixX<typename Y::Scalar>(dy.array() * y.array() * (1 - y.array()));
}

template <typename Y, typename G>
auto tanh_backward(const Eigen::MatrixBase<Y>& y, const Eigen::MatrixBase<G>& dy) {
  return MatrixX<typename Y::Scalar>(dy.array() * (1 - y.array().square()));
}

template <typename A, typename B>
auto hadamard(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  require_same_shape(a, b, "hadamard");
  return MatrixX<typename A::Scalar>(a.cwiseProduct(b));
}

template <typename A, typename B>
auto add(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  require_same_shape(a, b, "add");
  return MatrixX<typename A::Scalar>(a + b);
}

// axis 0 stacks rows, axis 1 stacks columns.
template <typename A, typename B>
auto concat(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b, int axis) {
  using Scalar = typename A::Scalar;
  MatrixX<Scalar> out;
  if (axis == 0) {
    if (a.cols() != b.cols()) {
      throw ShapeError("concat axis 0: column mismatch " + shape_string(a.rows(), a.cols()) +
                       " vs " + shape_string(b.rows(), b.cols()));
    }
    out.resize(a.rows() + b.rows(), a.cols());
    out << a, b;
  } else if (axis == 1) {
    if (a.rows() != b.rows()) {
      throw ShapeError("concat axis 1: row mismatch " + shape_string(a.rows(), a.cols()) +
                       " vs " + shape_string(b.rows(), b.cols()));
    }
    out.resize(a.rows(), a.cols() + b.cols());
    out << a, b;
  } else {
    throw ValidationError("concat axis must be 0 or 1");
  }
  return out;
}

// Splits dy back into the gradients of concat's two inputs; `split` is the
// extent of the first input along `axis`.
template <typename G>
std::pair<MatrixX<typename G::Scalar>, MatrixX<typename G::Scalar>> concat_backward(
    const Eigen::MatrixBase<G>& dy, Eigen::Index split, int axis) {
  if (axis == 0) return {dy.topRows(split), dy.bottomRows(dy.rows() - split)};
  return {dy.leftCols(split), dy.rightCols(dy.cols() - split)};
}

// out = x * W + b, with x n x a, W a x b, b 1 x b.
template <typename X, typename W, typename B>
auto affine(const Eigen::MatrixBase<X>& x, const Eigen::MatrixBase<W>& w,
            const Eigen::MatrixBase<B>& b) {
  if (x.cols() != w.rows() || b.rows() != 1 || b.cols() != w.cols()) {
    throw ShapeError("affine: x " + shape_string(x.rows(), x.cols()) + ", W " +
                     shape_string(w.rows(), w.cols()) + ", b " + shape_string(b.rows(), b.cols()));
  }
  MatrixX<typename X::Scalar> out = x * w;
  out.rowwise() += b.row(0);
  return out;
}

// Accumulates into dw, db and returns dx.
template <typename X, typename W, typename G>
auto affine_backward(const Eigen::MatrixBase<X>& x, const Eigen::MatrixBase<W>& w,
                     const Eigen::MatrixBase<G>& dy, MatrixX<typename X::Scalar>& dw,
                     MatrixX<typename X::Scalar>& db) {
  dw.noalias() += x.transpose() * dy;
  db += dy.colwise().sum();
  return MatrixX<typename X::Scalar>(dy * w.transpose());
}

// max(v) + ln sum exp(v - max(v)); throws on empty input.
template <typename Derived>
typename Derived::Scalar log_sum_exp(const Eigen::DenseBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  if (v.size() == 0) throw ValidationError("log_sum_exp of an empty vector");
  const Scalar m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.derived().array() - m).exp().sum());
}

// Inverted dropout. `mask` holds 0 or 1/(1-rate) per element and is reused by
// dropout_backward. Inference mode (or rate 0) is the identity and draws
// nothing from rng.
struct DropoutResult {
  Tensor output;
  Tensor mask;  // empty when the op was the identity
};

DropoutResult dropout(const Tensor& x, double rate, bool training, Rng& rng);
Tensor dropout_backward(const Tensor& mask, const Tensor& dy);

}  // namespace dsner
