#pragma once

#include <string>
#include <vector>

#include "dsner/tensor.hpp"
#include "dsner/vocab.hpp"

namespace dsner {

// Gate blocks are packed along columns in the order input, forget, cell
// candidate, output: block k occupies columns [k*H, (k+1)*H).
enum class Gate : int { Input = 0, Forget = 1, Cell = 2, Output = 3 };

struct LstmWeights {
  Parameter wx;    // in_dim x 4H, input-to-gate
  Parameter wh;    // H x 4H, recurrent
  Parameter bias;  // 1 x 4H

  int hidden() const { return static_cast<int>(wh.value.rows()); }
  int input_dim() const { return static_cast<int>(wx.value.rows()); }

  auto wx_gate(Gate g) { return wx.value.middleCols(static_cast<int>(g) * hidden(), hidden()); }
  auto wh_gate(Gate g) { return wh.value.middleCols(static_cast<int>(g) * hidden(), hidden()); }
  auto bias_gate(Gate g) { return bias.value.middleCols(static_cast<int>(g) * hidden(), hidden()); }

  // Glorot-uniform blocks per gate, zero biases except forget = 1.
  static LstmWeights init(const std::string& prefix, int in_dim, int hidden, Rng& rng);
  static LstmWeights zeros(const std::string& prefix, int in_dim, int hidden);

  std::vector<Parameter*> parameters() { return {&wx, &wh, &bias}; }
};

struct LstmState {
  RowVector h;
  RowVector c;

  static LstmState zeros(int hidden) {
    return {RowVector::Zero(hidden), RowVector::Zero(hidden)};
  }
};

LstmState lstm_cell_step(const RowVector& x, const LstmState& state, const LstmWeights& w);

// Forward activations kept for backpropagation through time.
struct LstmTrace {
  Tensor input;   // n x in_dim
  Tensor gates;   // n x 4H, post-activation
  Tensor cells;   // n x H
  Tensor hidden;  // n x H
  RowVector h0;
  RowVector c0;
};

// Returns [h_1 .. h_n] as rows. The default initial state is zero.
Tensor lstm_run(const Tensor& seq, const LstmWeights& w, LstmTrace* trace = nullptr);
Tensor lstm_run(const Tensor& seq, const LstmWeights& w, const LstmState& init,
                LstmTrace* trace = nullptr);

// Accumulates weight gradients and returns d(seq) for upstream dh (n x H).
Tensor lstm_backward(const LstmTrace& trace, LstmWeights& w, const Tensor& dh);

struct BiLstmLayer {
  LstmWeights forward;
  LstmWeights backward;

  int hidden() const { return forward.hidden(); }
  int input_dim() const { return forward.input_dim(); }
  int output_dim() const { return 2 * hidden(); }

  static BiLstmLayer init(const std::string& prefix, int in_dim, int hidden, Rng& rng);
  static BiLstmLayer zeros(const std::string& prefix, int in_dim, int hidden);

  std::vector<Parameter*> parameters();
};

struct BiLstmTrace {
  LstmTrace forward;
  LstmTrace backward;  // over the reversed sequence
};

// Row t is [forward h_t, backward h_t]; the backward direction reads the
// reversed sequence and its outputs are re-reversed to align.
Tensor bilstm_run(const Tensor& seq, const BiLstmLayer& layer, BiLstmTrace* trace = nullptr);
Tensor bilstm_backward(const BiLstmTrace& trace, BiLstmLayer& layer, const Tensor& dout);

struct EncoderTrace {
  std::vector<Tensor> masks;  // dropout mask applied to each layer's input
  std::vector<BiLstmTrace> layers;
};

// Dropout on the input of every layer (training only), then the Bi-LSTM.
Tensor stacked_encode(const Tensor& seq, const std::vector<BiLstmLayer>& layers,
                      double dropout_rate, bool training, Rng& rng,
                      EncoderTrace* trace = nullptr);
Tensor stacked_encode_backward(const EncoderTrace& trace, std::vector<BiLstmLayer>& layers,
                               const Tensor& dout);

struct CharEncodeTrace {
  std::vector<int> ids;
  BiLstmTrace lstm;
};

// Fixed-size word vector [last forward h, last backward h] of width 2H.
RowVector char_encode_word(const std::vector<int>& char_ids, const EmbeddingMatrix& table,
                           const BiLstmLayer& layer, CharEncodeTrace* trace = nullptr);
void char_encode_backward(const CharEncodeTrace& trace, EmbeddingMatrix& table,
                          BiLstmLayer& layer, const RowVector& dy);

}  // namespace dsner
