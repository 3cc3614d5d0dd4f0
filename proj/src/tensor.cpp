#include "dsner/tensor.hpp"

#include "dsner/ops.hpp"

namespace dsner {

Tensor uniform(Eigen::Index rows, Eigen::Index cols, double scale, Rng& rng) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  Tensor t(rows, cols);
  // Row-major fill so the draw order does not depend on storage layout.
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) t(r, c) = dist(rng);
  return t;
}

Tensor glorot_uniform(Eigen::Index fan_in, Eigen::Index fan_out, Rng& rng) {
  const double s = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  return uniform(fan_in, fan_out, s, rng);
}

DropoutResult dropout(const Tensor& x, double rate, bool training, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw ValidationError("dropout rate must lie in [0, 1), got " + std::to_string(rate));
  }
  if (!training || rate == 0.0) return {x, Tensor()};
  std::bernoulli_distribution keep(1.0 - rate);
  const double scale = 1.0 / (1.0 - rate);
  Tensor mask(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r)
    for (Eigen::Index c = 0; c < x.cols(); ++c) mask(r, c) = keep(rng) ? scale : 0.0;
  return {x.cwiseProduct(mask), std::move(mask)};
}

Tensor dropout_backward(const Tensor& mask, const Tensor& dy) {
  if (mask.size() == 0) return dy;
  require_same_shape(mask, dy, "dropout_backward");
  return dy.cwiseProduct(mask);
}

}  // namespace dsner
