#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "dsner/errors.hpp"

namespace dsner {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using RowVectorX = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

// Rows are time steps / tokens, columns are features. Training and tests run
// in double precision throughout.
using Tensor = MatrixX<double>;
using RowVector = RowVectorX<double>;
using Rng = std::mt19937_64;

inline std::string shape_string(Eigen::Index rows, Eigen::Index cols) {
  return "(" + std::to_string(rows) + "x" + std::to_string(cols) + ")";
}

template <typename A, typename B>
void require_same_shape(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b,
                        const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_string(a.rows(), a.cols()) +
                     " vs " + shape_string(b.rows(), b.cols()));
  }
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& x) {
  return x.allFinite();
}

// A trainable tensor with its gradient buffer.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;
  // L2 augmentation applies to this parameter.
  bool decay = true;
  // Embedding tables: the optimizer touches only rows with a nonzero gradient.
  bool row_sparse = false;
  // Row held at zero and never updated (the PAD embedding), -1 for none.
  Eigen::Index frozen_row = -1;

  Parameter() = default;
  Parameter(std::string n, Tensor v, bool with_decay = true)
      : name(std::move(n)), value(std::move(v)), grad(Tensor::Zero(value.rows(), value.cols())),
        decay(with_decay) {}

  void zero_grad() { grad.setZero(value.rows(), value.cols()); }
  Eigen::Index size() const { return value.size(); }
};

// uniform(-s, s) with s = sqrt(6 / (fan_in + fan_out)).
Tensor glorot_uniform(Eigen::Index fan_in, Eigen::Index fan_out, Rng& rng);
Tensor uniform(Eigen::Index rows, Eigen::Index cols, double scale, Rng& rng);

}  // namespace dsner
