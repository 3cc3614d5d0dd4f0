#pragma once

#include <vector>

#include "dsner/corpus.hpp"
#include "dsner/tensor.hpp"

namespace dsner {

// Linear-chain CRF parameters. transitions(i, j) scores label j following
// label i; start and end score the first and last labels.
struct CrfParams {
  Parameter transitions;  // K x K
  Parameter start;        // 1 x K
  Parameter end;          // 1 x K

  int num_labels() const { return static_cast<int>(transitions.value.rows()); }

  static CrfParams zeros(int num_labels = kNumTags);
  std::vector<Parameter*> parameters() { return {&transitions, &start, &end}; }
};

// Score assigned to forbidden moves by constrained decoding.
inline constexpr double kForbiddenScore = -1e4;

// Copy with start -> I-DS and O -> I-DS pinned to kForbiddenScore.
CrfParams constrain_iob(const CrfParams& crf);

// start[y_1] + sum_t em(t, y_t) + sum_t transitions(y_t, y_t+1) + end[y_n]
double sequence_score(const Tensor& emissions, const std::vector<int>& tags, const CrfParams& crf);

// log of the summed exp(sequence_score) over all K^n label sequences,
// via the forward recursion.
double log_partition(const Tensor& emissions, const CrfParams& crf);

// log_partition - sequence_score(gold).
double nll_loss(const Tensor& emissions, const std::vector<int>& tags, const CrfParams& crf);

// Same value as nll_loss. Adds scale * dNLL into the CRF gradients and
// returns scale * dNLL/d(emissions).
double nll_loss_backward(const Tensor& emissions, const std::vector<int>& tags, CrfParams& crf,
                         Tensor& d_emissions, double scale = 1.0);

struct Decoded {
  std::vector<int> tags;
  double score = 0;  // equals sequence_score(emissions, tags, effective params)
};

// Highest-scoring label sequence; ties go to the lowest label index at each
// backtracking step. With `constrained`, decoding runs on constrain_iob(crf).
Decoded viterbi_decode(const Tensor& emissions, const CrfParams& crf, bool constrained = false);

}  // namespace dsner
