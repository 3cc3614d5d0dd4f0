#include "dsner/optim.hpp"

#include <algorithm>
#include <cmath>

namespace dsner {

void zero_grads(std::span<Parameter* const> params) {
  for (Parameter* p : params) p->zero_grad();
}

namespace {

void check_finite(const Parameter& p) {
  if (!p.grad.allFinite()) throw NumericError("non-finite gradient in parameter '" + p.name + "'");
}

}  // namespace

void adam_step(std::span<Parameter* const> params, AdamState& state, double lr, double l2) {
  for (const Parameter* p : params) check_finite(*p);

  if (state.m.size() != params.size()) {
    state.m.clear();
    state.v.clear();
    for (const Parameter* p : params) {
      state.m.push_back(Tensor::Zero(p->value.rows(), p->value.cols()));
      state.v.push_back(Tensor::Zero(p->value.rows(), p->value.cols()));
    }
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double corr1 = 1.0 - std::pow(state.beta1, t);
  const double corr2 = 1.0 - std::pow(state.beta2, t);

  for (std::size_t k = 0; k < params.size(); ++k) {
    Parameter& p = *params[k];
    Tensor& m = state.m[k];
    Tensor& v = state.v[k];
    if (m.rows() != p.value.rows() || m.cols() != p.value.cols()) {
      throw ShapeError("optimizer state does not match parameter '" + p.name + "'");
    }

    auto update_rows = [&](Eigen::Index r0, Eigen::Index count) {
      auto theta = p.value.middleRows(r0, count);
      Tensor g = p.grad.middleRows(r0, count);
      if (p.decay && l2 != 0.0) g += l2 * theta;
      auto mr = m.middleRows(r0, count);
      auto vr = v.middleRows(r0, count);
      mr = state.beta1 * mr + (1.0 - state.beta1) * g;
      vr = state.beta2 * vr + (1.0 - state.beta2) * g.cwiseProduct(g);
      theta.array() -= lr * (mr.array() / corr1) / ((vr.array() / corr2).sqrt() + state.epsilon);
    };

    if (p.row_sparse) {
      for (Eigen::Index r = 0; r < p.value.rows(); ++r) {
        if (r == p.frozen_row) continue;
        if (p.grad.row(r).isZero(0.0)) continue;
        update_rows(r, 1);
      }
    } else {
      update_rows(0, p.value.rows());
      if (p.frozen_row >= 0) p.value.row(p.frozen_row).setZero();
    }
  }
}

double clip_grad_norm(std::span<Parameter* const> params, double max_norm) {
  double sq = 0;
  for (const Parameter* p : params) sq += p->grad.squaredNorm();
  const double norm = std::sqrt(sq);
  if (max_norm > 0 && norm > max_norm) {
    const double scale = max_norm / norm;
    for (Parameter* p : params) p->grad *= scale;
  }
  return norm;
}

GradCheckReport grad_check(const std::function<double()>& loss,
                           std::span<Parameter* const> params, double eps) {
  GradCheckReport report;
  for (Parameter* p : params) {
    GradCheckEntry entry{p->name, 0.0, 0.0};
    for (Eigen::Index i = 0; i < p->value.size(); ++i) {
      double& theta = p->value.data()[i];
      const double saved = theta;
      theta = saved + eps;
      const double up = loss();
      theta = saved - eps;
      const double down = loss();
      theta = saved;
      const double numeric = (up - down) / (2.0 * eps);
      const double analytic = p->grad.data()[i];
      const double rel =
          std::abs(analytic - numeric) / std::max(1e-8, std::abs(analytic) + std::abs(numeric));
      entry.max_rel_error = std::max(entry.max_rel_error, rel);
      entry.max_abs_analytic = std::max(entry.max_abs_analytic, std::abs(analytic));
    }
    report.max_rel_error = std::max(report.max_rel_error, entry.max_rel_error);
    report.entries.push_back(std::move(entry));
  }
  return report;
}

}  // namespace dsner
