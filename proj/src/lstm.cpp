#include "dsner/lstm.hpp"

#include "dsner/ops.hpp"

namespace dsner {

namespace {

constexpr int kGates = 4;
using RowArray = Eigen::Array<double, 1, Eigen::Dynamic>;

void check_input(const Tensor& seq, const LstmWeights& w) {
  if (seq.rows() == 0) throw ValidationError("LSTM input sequence is empty");
  if (seq.cols() != w.input_dim()) {
    throw ShapeError("LSTM input " + shape_string(seq.rows(), seq.cols()) +
                     " does not match input weights " +
                     shape_string(w.wx.value.rows(), w.wx.value.cols()));
  }
}

// Applies the gate nonlinearities in place to a 1 x 4H pre-activation row.
template <typename Row>
void activate(Row&& z, int h) {
  z.segment(0, 2 * h) = sigmoid(z.segment(0, 2 * h));
  z.segment(2 * h, h) = z.segment(2 * h, h).array().tanh().matrix();
  z.segment(3 * h, h) = sigmoid(z.segment(3 * h, h));
}

Tensor reversed(const Tensor& x) { return x.colwise().reverse(); }

}  // namespace

LstmWeights LstmWeights::init(const std::string& prefix, int in_dim, int hidden, Rng& rng) {
  LstmWeights w = zeros(prefix, in_dim, hidden);
  for (int g = 0; g < kGates; ++g) {
    w.wx_gate(static_cast<Gate>(g)) = glorot_uniform(in_dim, hidden, rng);
    w.wh_gate(static_cast<Gate>(g)) = glorot_uniform(hidden, hidden, rng);
  }
  w.bias_gate(Gate::Forget).setOnes();
  return w;
}

LstmWeights LstmWeights::zeros(const std::string& prefix, int in_dim, int hidden) {
  if (in_dim <= 0 || hidden <= 0) throw ConfigError("LSTM dimensions must be positive");
  return {Parameter(prefix + ".wx", Tensor::Zero(in_dim, kGates * hidden)),
          Parameter(prefix + ".wh", Tensor::Zero(hidden, kGates * hidden)),
          Parameter(prefix + ".bias", Tensor::Zero(1, kGates * hidden))};
}

LstmState lstm_cell_step(const RowVector& x, const LstmState& state, const LstmWeights& w) {
  const int h = w.hidden();
  if (x.size() != w.input_dim() || state.h.size() != h || state.c.size() != h) {
    throw ShapeError("lstm_cell_step: x " + shape_string(1, x.size()) + ", h " +
                     shape_string(1, state.h.size()) + ", c " + shape_string(1, state.c.size()) +
                     " against weights " + shape_string(w.wx.value.rows(), w.wx.value.cols()));
  }
  RowVector z = x * w.wx.value + state.h * w.wh.value + w.bias.value;
  activate(z, h);
  LstmState next;
  next.c = z.segment(h, h).cwiseProduct(state.c) + z.segment(0, h).cwiseProduct(z.segment(2 * h, h));
  next.h = z.segment(3 * h, h).cwiseProduct(next.c.array().tanh().matrix());
  return next;
}

Tensor lstm_run(const Tensor& seq, const LstmWeights& w, LstmTrace* trace) {
  return lstm_run(seq, w, LstmState::zeros(w.hidden()), trace);
}

Tensor lstm_run(const Tensor& seq, const LstmWeights& w, const LstmState& init, LstmTrace* trace) {
  check_input(seq, w);
  const int h = w.hidden();
  const Eigen::Index n = seq.rows();

  Tensor gates = seq * w.wx.value;
  gates.rowwise() += w.bias.value.row(0);
  Tensor cells(n, h);
  Tensor hidden(n, h);

  RowVector h_prev = init.h;
  RowVector c_prev = init.c;
  for (Eigen::Index t = 0; t < n; ++t) {
    auto z = gates.row(t);
    z.noalias() += h_prev * w.wh.value;
    activate(z, h);
    cells.row(t) = z.segment(h, h).cwiseProduct(c_prev) + z.segment(0, h).cwiseProduct(z.segment(2 * h, h));
    hidden.row(t) = z.segment(3 * h, h).cwiseProduct(cells.row(t).array().tanh().matrix());
    h_prev = hidden.row(t);
    c_prev = cells.row(t);
  }
  if (trace) {
    trace->input = seq;
    trace->gates = std::move(gates);
    trace->cells = cells;
    trace->hidden = hidden;
    trace->h0 = init.h;
    trace->c0 = init.c;
  }
  return hidden;
}

Tensor lstm_backward(const LstmTrace& tr, LstmWeights& w, const Tensor& dh_out) {
  const int h = w.hidden();
  const Eigen::Index n = tr.hidden.rows();
  require_same_shape(dh_out, tr.hidden, "lstm_backward");

  Tensor dz(n, kGates * h);
  RowVector dh_next = RowVector::Zero(h);
  RowVector dc_next = RowVector::Zero(h);

  for (Eigen::Index t = n - 1; t >= 0; --t) {
    const auto gate = tr.gates.row(t);
    const auto i = gate.segment(0, h).array();
    const auto f = gate.segment(h, h).array();
    const auto g = gate.segment(2 * h, h).array();
    const auto o = gate.segment(3 * h, h).array();
    const RowVector c_prev = t > 0 ? RowVector(tr.cells.row(t - 1)) : tr.c0;
    const RowArray tanh_c = tr.cells.row(t).array().tanh();

    const RowArray dh = (dh_out.row(t) + dh_next).array();
    const RowArray dc = dh * o * (1 - tanh_c.square()) + dc_next.array();

    dz.row(t).segment(0, h) = (dc * g * i * (1 - i)).matrix();
    dz.row(t).segment(h, h) = (dc * c_prev.array() * f * (1 - f)).matrix();
    dz.row(t).segment(2 * h, h) = (dc * i * (1 - g.square())).matrix();
    dz.row(t).segment(3 * h, h) = (dh * tanh_c * o * (1 - o)).matrix();

    dc_next = (dc * f).matrix();
    dh_next.noalias() = dz.row(t) * w.wh.value.transpose();
  }

  Tensor h_prev(n, h);
  h_prev.row(0) = tr.h0;
  if (n > 1) h_prev.bottomRows(n - 1) = tr.hidden.topRows(n - 1);

  w.wx.grad.noalias() += tr.input.transpose() * dz;
  w.wh.grad.noalias() += h_prev.transpose() * dz;
  w.bias.grad += dz.colwise().sum();
  return dz * w.wx.value.transpose();
}

BiLstmLayer BiLstmLayer::init(const std::string& prefix, int in_dim, int hidden, Rng& rng) {
  LstmWeights fw = LstmWeights::init(prefix + ".fw", in_dim, hidden, rng);
  LstmWeights bw = LstmWeights::init(prefix + ".bw", in_dim, hidden, rng);
  return {std::move(fw), std::move(bw)};
}

BiLstmLayer BiLstmLayer::zeros(const std::string& prefix, int in_dim, int hidden) {
  return {LstmWeights::zeros(prefix + ".fw", in_dim, hidden),
          LstmWeights::zeros(prefix + ".bw", in_dim, hidden)};
}

std::vector<Parameter*> BiLstmLayer::parameters() {
  std::vector<Parameter*> out = forward.parameters();
  for (Parameter* p : backward.parameters()) out.push_back(p);
  return out;
}

Tensor bilstm_run(const Tensor& seq, const BiLstmLayer& layer, BiLstmTrace* trace) {
  if (layer.forward.hidden() != layer.backward.hidden()) {
    throw ConfigError("Bi-LSTM directions have different hidden sizes");
  }
  const Tensor fw = lstm_run(seq, layer.forward, trace ? &trace->forward : nullptr);
  const Tensor bw = lstm_run(reversed(seq), layer.backward, trace ? &trace->backward : nullptr);
  return concat(fw, reversed(bw), 1);
}

Tensor bilstm_backward(const BiLstmTrace& trace, BiLstmLayer& layer, const Tensor& dout) {
  const int h = layer.hidden();
  if (dout.cols() != 2 * h) throw ShapeError("bilstm_backward: gradient width mismatch");
  Tensor dx = lstm_backward(trace.forward, layer.forward, dout.leftCols(h));
  dx += reversed(lstm_backward(trace.backward, layer.backward, reversed(dout.rightCols(h))));
  return dx;
}

Tensor stacked_encode(const Tensor& seq, const std::vector<BiLstmLayer>& layers,
                      double dropout_rate, bool training, Rng& rng, EncoderTrace* trace) {
  if (layers.empty()) throw ConfigError("encoder needs at least one layer");
  if (trace) {
    trace->masks.clear();
    trace->layers.assign(layers.size(), {});
  }
  Tensor x = seq;
  for (std::size_t k = 0; k < layers.size(); ++k) {
    if (x.cols() != layers[k].input_dim()) {
      throw ConfigError("encoder layer " + std::to_string(k) + " expects input width " +
                        std::to_string(layers[k].input_dim()) + ", got " +
                        std::to_string(x.cols()));
    }
    DropoutResult d = dropout(x, dropout_rate, training, rng);
    if (trace) trace->masks.push_back(std::move(d.mask));
    x = bilstm_run(d.output, layers[k], trace ? &trace->layers[k] : nullptr);
  }
  return x;
}

Tensor stacked_encode_backward(const EncoderTrace& trace, std::vector<BiLstmLayer>& layers,
                               const Tensor& dout) {
  Tensor d = dout;
  for (std::size_t k = layers.size(); k-- > 0;) {
    d = bilstm_backward(trace.layers[k], layers[k], d);
    d = dropout_backward(trace.masks[k], d);
  }
  return d;
}

RowVector char_encode_word(const std::vector<int>& char_ids, const EmbeddingMatrix& table,
                           const BiLstmLayer& layer, CharEncodeTrace* trace) {
  if (char_ids.empty()) throw ValidationError("cannot encode a word with no characters");
  const Tensor out = bilstm_run(lookup(table, char_ids), layer, trace ? &trace->lstm : nullptr);
  if (trace) trace->ids = char_ids;
  const int h = layer.hidden();
  RowVector v(2 * h);
  v << out.row(out.rows() - 1).leftCols(h), out.row(0).rightCols(h);
  return v;
}

void char_encode_backward(const CharEncodeTrace& trace, EmbeddingMatrix& table,
                          BiLstmLayer& layer, const RowVector& dy) {
  const int h = layer.hidden();
  const auto n = static_cast<Eigen::Index>(trace.ids.size());
  Tensor dout = Tensor::Zero(n, 2 * h);
  dout.row(n - 1).leftCols(h) = dy.leftCols(h);
  dout.row(0).rightCols(h) += dy.rightCols(h);
  lookup_backward(table, trace.ids, bilstm_backward(trace.lstm, layer, dout));
}

}  // namespace dsner
