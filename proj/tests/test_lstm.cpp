#include <doctest.h>

#include "dsner/lstm.hpp"
#include "support/primitive_grads.hpp"

using namespace dsner;

namespace {

LstmWeights scalar_ones() {
  LstmWeights w = LstmWeights::zeros("s", 1, 1);
  w.wx.value.setOnes();
  w.wh.value.setOnes();
  return w;
}

// Reference values from a 30-digit scalar evaluation of the cell equations
// with all weights 1, biases 0, x = 1 at every step and a zero start state.
constexpr double kCell[3] = {0.55676994114593974, 1.1444461579991029, 1.7394875218692438};
constexpr double kHidden[3] = {0.36960635293570577, 0.65053522320081335, 0.78876582774045941};

}  // namespace

TEST_CASE("cell zero case") {
  const LstmWeights w = LstmWeights::zeros("z", 3, 2);
  const LstmState s = lstm_cell_step(RowVector::Zero(3), LstmState::zeros(2), w);
  CHECK(s.h.isZero(0.0));
  CHECK(s.c.isZero(0.0));
}

TEST_CASE("scalar cell matches the high-precision oracle") {
  const LstmWeights w = scalar_ones();
  const LstmState s = lstm_cell_step(RowVector::Ones(1), LstmState::zeros(1), w);
  CHECK(std::abs(s.c(0) - kCell[0]) < 1e-12);
  CHECK(std::abs(s.h(0) - kHidden[0]) < 1e-12);

  const Tensor h = lstm_run(Tensor::Ones(3, 1), w);
  REQUIRE(h.rows() == 3);
  LstmTrace trace;
  lstm_run(Tensor::Ones(3, 1), w, &trace);
  for (int t = 0; t < 3; ++t) {
    CHECK(std::abs(h(t, 0) - kHidden[t]) < 1e-12);
    CHECK(std::abs(trace.cells(t, 0) - kCell[t]) < 1e-12);
  }
}

TEST_CASE("lstm_cell_step rejects bad shapes") {
  const LstmWeights w = LstmWeights::zeros("z", 3, 2);
  CHECK_THROWS_AS(lstm_cell_step(RowVector::Zero(2), LstmState::zeros(2), w), ShapeError);
  CHECK_THROWS_AS(lstm_cell_step(RowVector::Zero(3), LstmState::zeros(3), w), ShapeError);
}

TEST_CASE("lstm_run") {
  Rng rng(1);
  const LstmWeights w = LstmWeights::init("w", 3, 4, rng);
  const Tensor x = uniform(1, 3, 1.0, rng);
  const LstmState one = lstm_cell_step(x, LstmState::zeros(4), w);
  CHECK(lstm_run(x, w).row(0) == one.h);
  CHECK(lstm_run(uniform(5, 3, 1.0, rng), LstmWeights::zeros("z", 3, 4)).isZero(0.0));
  CHECK_THROWS_AS(lstm_run(Tensor(0, 3), w), ValidationError);

  const Tensor seq = uniform(6, 3, 1.0, rng);
  CHECK(lstm_run(seq, w) == lstm_run(seq, w));
}

TEST_CASE("init follows the forget-bias convention") {
  Rng rng(1);
  LstmWeights w = LstmWeights::init("w", 5, 3, rng);
  CHECK(w.bias_gate(Gate::Forget).isOnes(0.0));
  CHECK(w.bias_gate(Gate::Input).isZero(0.0));
  CHECK(w.bias_gate(Gate::Cell).isZero(0.0));
  CHECK(w.bias_gate(Gate::Output).isZero(0.0));
  CHECK(w.wx_gate(Gate::Input).cwiseAbs().maxCoeff() <= std::sqrt(6.0 / 8.0));
}

TEST_CASE("gradients match central differences") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    CHECK(testing::lstm_cell_gradient_error(seed) < 1e-6);
    CHECK(testing::bilstm_gradient_error(seed) < 1e-6);
  }

  // Multi-step run from a nonzero initial state.
  Rng rng(7);
  LstmWeights w = LstmWeights::init("w", 2, 3, rng);
  w.bias.value = uniform(1, 12, 0.5, rng);
  Parameter x("x", uniform(4, 2, 1.0, rng));
  const LstmState init{uniform(1, 3, 0.5, rng), uniform(1, 3, 0.5, rng)};
  const Tensor r = uniform(4, 3, 1.0, rng);
  for (Parameter* p : w.parameters()) p->zero_grad();
  LstmTrace trace;
  lstm_run(x.value, w, init, &trace);
  x.grad = lstm_backward(trace, w, r);
  std::vector<Parameter*> ps = w.parameters();
  ps.push_back(&x);
  const auto loss = [&] { return lstm_run(x.value, w, init).cwiseProduct(r).sum(); };
  CHECK(grad_check(loss, ps, 1e-6).max_rel_error < 1e-6);
}

TEST_CASE("bilstm_run") {
  Rng rng(4);
  const BiLstmLayer layer = BiLstmLayer::init("bi", 3, 5, rng);
  const Tensor seq = uniform(4, 3, 1.0, rng);
  const Tensor out = bilstm_run(seq, layer);
  CHECK(out.rows() == 4);
  CHECK(out.cols() == 10);
  CHECK(layer.output_dim() == 10);
  CHECK(out.leftCols(5) == lstm_run(seq, layer.forward));

  const Tensor reversed = seq.colwise().reverse();
  CHECK(out.rightCols(5) == lstm_run(reversed, layer.backward).colwise().reverse());

  CHECK(bilstm_run(seq, BiLstmLayer::zeros("z", 3, 5)).isZero(0.0));
}

TEST_CASE("bilstm mirror symmetry on a palindrome") {
  Rng rng(9);
  BiLstmLayer layer = BiLstmLayer::init("bi", 2, 3, rng);
  layer.backward.wx.value = layer.forward.wx.value;
  layer.backward.wh.value = layer.forward.wh.value;
  layer.backward.bias.value = layer.forward.bias.value;
  const Tensor a = uniform(1, 2, 1.0, rng), b = uniform(1, 2, 1.0, rng);
  Tensor seq(3, 2);
  seq << a, b, a;
  const Tensor out = bilstm_run(seq, layer);
  for (int t = 0; t < 3; ++t) {
    CHECK(out.row(t).leftCols(3) == out.row(2 - t).rightCols(3));
  }
}

TEST_CASE("stacked_encode") {
  Rng rng(5);
  std::vector<BiLstmLayer> one{BiLstmLayer::init("e0", 3, 2, rng)};
  const Tensor seq = uniform(5, 3, 1.0, rng);
  Rng any(1);
  CHECK(stacked_encode(seq, one, 0.0, true, any) == bilstm_run(seq, one[0]));

  std::vector<BiLstmLayer> two{BiLstmLayer::init("e0", 3, 2, rng), BiLstmLayer::zeros("e1", 4, 2)};
  CHECK(stacked_encode(seq, two, 0.0, true, any).isZero(0.0));

  two[1] = BiLstmLayer::init("e1", 4, 2, rng);
  Rng s1(1), s2(999);
  CHECK(stacked_encode(seq, two, 0.5, false, s1) == stacked_encode(seq, two, 0.5, false, s2));

  std::vector<BiLstmLayer> bad{BiLstmLayer::init("e0", 3, 2, rng), BiLstmLayer::init("e1", 3, 2, rng)};
  CHECK_THROWS_AS(stacked_encode(seq, bad, 0.0, false, any), ConfigError);

  SUBCASE("gradient through dropout and two layers") {
    Parameter x("x", seq);
    const Tensor r = uniform(5, 4, 1.0, rng);
    const auto run = [&](EncoderTrace* trace) {
      Rng fixed(42);
      return stacked_encode(x.value, two, 0.3, true, fixed, trace);
    };
    std::vector<Parameter*> ps;
    for (BiLstmLayer& l : two)
      for (Parameter* p : l.parameters()) {
        p->zero_grad();
        ps.push_back(p);
      }
    EncoderTrace trace;
    run(&trace);
    x.grad = stacked_encode_backward(trace, two, r);
    ps.push_back(&x);
    // Deeper composition: a larger step keeps roundoff out of tiny entries.
    CHECK(grad_check([&] { return run(nullptr).cwiseProduct(r).sum(); }, ps, 1e-5).max_rel_error < 1e-6);
  }
}

TEST_CASE("char_encode_word") {
  Rng rng(6);
  EmbeddingMatrix table{Parameter("chars", uniform(6, 3, 1.0, rng)), true};
  const BiLstmLayer layer = BiLstmLayer::init("c", 3, 4, rng);

  const RowVector single = char_encode_word({2}, table, layer);
  CHECK(single.size() == 8);
  const RowVector longer = char_encode_word({2, 3, 4, 5, 1}, table, layer);
  CHECK(longer.size() == 8);
  CHECK(longer.allFinite());

  const Tensor out = bilstm_run(lookup(table, {2, 3, 4}), layer);
  const RowVector v = char_encode_word({2, 3, 4}, table, layer);
  CHECK(v.leftCols(4) == out.row(2).leftCols(4));
  CHECK(v.rightCols(4) == out.row(0).rightCols(4));

  CHECK(char_encode_word({2, 3}, table, BiLstmLayer::zeros("z", 3, 4)).isZero(0.0));
  CHECK_THROWS_AS(char_encode_word({}, table, layer), ValidationError);
  // Unknown characters still produce a usable vector.
  CHECK(char_encode_word({Vocabulary::kUnk, Vocabulary::kUnk}, table, layer).allFinite());
  CHECK(char_encode_word({2, 3, 4}, table, layer) == v);

  SUBCASE("gradient") {
    BiLstmLayer l = layer;
    const std::vector<int> ids{2, 3, 3, 5};
    const RowVector r = uniform(1, 8, 1.0, rng);
    std::vector<Parameter*> ps = l.parameters();
    ps.push_back(&table.table);
    for (Parameter* p : ps) p->zero_grad();
    CharEncodeTrace trace;
    char_encode_word(ids, table, l, &trace);
    char_encode_backward(trace, table, l, r);
    const auto loss = [&] { return char_encode_word(ids, table, l).dot(r); };
    CHECK(grad_check(loss, ps, 1e-6).max_rel_error < 1e-6);
  }
}
