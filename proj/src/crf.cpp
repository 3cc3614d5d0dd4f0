#include "dsner/crf.hpp"

#include "dsner/ops.hpp"

namespace dsner {

namespace {

void check_emissions(const Tensor& em, const CrfParams& crf) {
  const int k = crf.num_labels();
  if (crf.transitions.value.cols() != k || crf.start.value.size() != k || crf.end.value.size() != k) {
    throw ShapeError("CRF parameters are inconsistent with " + std::to_string(k) + " labels");
  }
  if (em.rows() == 0) throw ValidationError("CRF needs at least one token");
  if (em.cols() != k) {
    throw ShapeError("emissions " + shape_string(em.rows(), em.cols()) + " vs " +
                     std::to_string(k) + " CRF labels");
  }
}

void check_tags(const Tensor& em, const std::vector<int>& tags, int k) {
  if (static_cast<Eigen::Index>(tags.size()) != em.rows()) {
    throw ShapeError("tag sequence of length " + std::to_string(tags.size()) + " for " +
                     std::to_string(em.rows()) + " emission rows");
  }
  for (int t : tags)
    if (t < 0 || t >= k) throw IndexError("label id out of range: " + std::to_string(t));
}

// alpha(t, j): log-sum of scores of all prefixes ending at label j.
Tensor forward_scores(const Tensor& em, const CrfParams& crf) {
  const Eigen::Index n = em.rows();
  const int k = crf.num_labels();
  Tensor alpha(n, k);
  alpha.row(0) = crf.start.value + em.row(0);
  for (Eigen::Index t = 1; t < n; ++t)
    for (int j = 0; j < k; ++j)
      alpha(t, j) = log_sum_exp(alpha.row(t - 1).transpose() + crf.transitions.value.col(j)) + em(t, j);
  return alpha;
}

// beta(t, i): log-sum of scores of all suffixes after label i at t.
Tensor backward_scores(const Tensor& em, const CrfParams& crf) {
  const Eigen::Index n = em.rows();
  const int k = crf.num_labels();
  Tensor beta(n, k);
  beta.row(n - 1) = crf.end.value;
  for (Eigen::Index t = n - 2; t >= 0; --t) {
    const RowVector next = em.row(t + 1) + beta.row(t + 1);
    for (int i = 0; i < k; ++i) beta(t, i) = log_sum_exp(crf.transitions.value.row(i) + next);
  }
  return beta;
}

}  // namespace

CrfParams CrfParams::zeros(int num_labels) {
  return {Parameter("crf.transitions", Tensor::Zero(num_labels, num_labels), false),
          Parameter("crf.start", Tensor::Zero(1, num_labels)),
          Parameter("crf.end", Tensor::Zero(1, num_labels))};
}

CrfParams constrain_iob(const CrfParams& crf) {
  CrfParams out = crf;
  out.transitions.value(tag_id(Tag::O), tag_id(Tag::I)) = kForbiddenScore;
  out.start.value(0, tag_id(Tag::I)) = kForbiddenScore;
  return out;
}

double sequence_score(const Tensor& em, const std::vector<int>& tags, const CrfParams& crf) {
  check_emissions(em, crf);
  check_tags(em, tags, crf.num_labels());
  // Fixed summation order (start, emissions, transitions, end) so that equal
  // paths always get bit-identical scores.
  double score = crf.start.value(0, tags.front());
  for (std::size_t t = 0; t < tags.size(); ++t) score += em(static_cast<Eigen::Index>(t), tags[t]);
  for (std::size_t t = 1; t < tags.size(); ++t) score += crf.transitions.value(tags[t - 1], tags[t]);
  return score + crf.end.value(0, tags.back());
}

double log_partition(const Tensor& em, const CrfParams& crf) {
  check_emissions(em, crf);
  const Tensor alpha = forward_scores(em, crf);
  return log_sum_exp(alpha.row(em.rows() - 1) + crf.end.value);
}

double nll_loss(const Tensor& em, const std::vector<int>& tags, const CrfParams& crf) {
  return log_partition(em, crf) - sequence_score(em, tags, crf);
}

double nll_loss_backward(const Tensor& em, const std::vector<int>& tags, CrfParams& crf,
                         Tensor& d_em, double scale) {
  check_emissions(em, crf);
  check_tags(em, tags, crf.num_labels());
  const Eigen::Index n = em.rows();
  const int k = crf.num_labels();
  const Tensor alpha = forward_scores(em, crf);
  const Tensor beta = backward_scores(em, crf);
  const double log_z = log_sum_exp(alpha.row(n - 1) + crf.end.value);

  // Node marginals minus the gold indicator.
  d_em = ((alpha + beta).array() - log_z).exp().matrix();
  for (Eigen::Index t = 0; t < n; ++t) d_em(t, tags[static_cast<std::size_t>(t)]) -= 1.0;

  Tensor& d_trans = crf.transitions.grad;
  for (Eigen::Index t = 0; t + 1 < n; ++t) {
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        d_trans(i, j) += scale * std::exp(alpha(t, i) + crf.transitions.value(i, j) +
                                          em(t + 1, j) + beta(t + 1, j) - log_z);
    d_trans(tags[static_cast<std::size_t>(t)], tags[static_cast<std::size_t>(t + 1)]) -= scale;
  }
  crf.start.grad += scale * d_em.row(0);
  crf.end.grad += scale * d_em.row(n - 1);
  d_em *= scale;

  return log_z - sequence_score(em, tags, crf);
}

Decoded viterbi_decode(const Tensor& em, const CrfParams& params, bool constrained) {
  const CrfParams crf = constrained ? constrain_iob(params) : params;
  check_emissions(em, crf);
  const Eigen::Index n = em.rows();
  const int k = crf.num_labels();

  Tensor best(n, k);
  Eigen::MatrixXi back = Eigen::MatrixXi::Zero(n, k);
  best.row(0) = crf.start.value + em.row(0);
  for (Eigen::Index t = 1; t < n; ++t) {
    for (int j = 0; j < k; ++j) {
      int arg = 0;
      double top = best(t - 1, 0) + crf.transitions.value(0, j);
      for (int i = 1; i < k; ++i) {
        const double s = best(t - 1, i) + crf.transitions.value(i, j);
        if (s > top) {
          top = s;
          arg = i;
        }
      }
      best(t, j) = top + em(t, j);
      back(t, j) = arg;
    }
  }

  int last = 0;
  double top = best(n - 1, 0) + crf.end.value(0, 0);
  for (int j = 1; j < k; ++j) {
    const double s = best(n - 1, j) + crf.end.value(0, j);
    if (s > top) {
      top = s;
      last = j;
    }
  }
  Decoded out;
  out.tags.assign(static_cast<std::size_t>(n), 0);
  out.tags.back() = last;
  for (Eigen::Index t = n - 1; t > 0; --t)
    out.tags[static_cast<std::size_t>(t - 1)] = back(t, out.tags[static_cast<std::size_t>(t)]);
  out.score = sequence_score(em, out.tags, crf);
  return out;
}

}  // namespace dsner
