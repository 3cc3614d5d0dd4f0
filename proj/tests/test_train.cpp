#include <doctest.h>

#include <set>

#include "dsner/fixtures.hpp"
#include "dsner/train.hpp"

using namespace dsner;

namespace {

const FixtureCorpus& fixtures() {
  static const FixtureCorpus corpus = generate_fixtures({});
  return corpus;
}

Model fixture_model(ModelConfig config) {
  const auto& f = fixtures();
  return Model::create(config, build_word_vocab(f.train), build_char_vocab(f.train));
}

std::vector<Sentence> head(const std::vector<Sentence>& v, std::size_t n) {
  return {v.begin(), v.begin() + static_cast<std::ptrdiff_t>(std::min(n, v.size()))};
}

}  // namespace

TEST_CASE("make_batches covers every sentence once") {
  std::vector<std::size_t> lengths{5, 3, 9, 3, 7, 1, 5, 5, 2, 8, 4};
  Rng rng(1);
  const auto batches = make_batches(lengths, 4, rng);
  std::multiset<std::size_t> seen;
  for (const auto& b : batches) {
    CHECK(b.size() <= 4);
    CHECK_FALSE(b.empty());
    seen.insert(b.begin(), b.end());
  }
  std::multiset<std::size_t> expected;
  for (std::size_t i = 0; i < lengths.size(); ++i) expected.insert(i);
  CHECK(seen == expected);

  Rng a(4), b(4);
  CHECK(make_batches(lengths, 3, a) == make_batches(lengths, 3, b));
}

TEST_CASE("patience counts epochs without strict improvement") {
  ModelConfig c = fixture_model_config(1);
  c.patience = 2;
  Model m = fixture_model(c);
  TrainHooks hooks;
  hooks.monitor = [](int, const Metrics&) { return 0.5; };
  const TrainHistory h = train(m, head(fixtures().train, 16), head(fixtures().validation, 8), hooks);
  CHECK(h.epochs.size() == 3);
  CHECK(h.best_epoch == 1);
  CHECK(h.stopped_early);
}

TEST_CASE("max_epochs caps training") {
  ModelConfig c = fixture_model_config(1);
  c.max_epochs = 2;
  c.patience = 2;
  Model m = fixture_model(c);
  TrainHooks hooks;
  int calls = 0;
  hooks.monitor = [&](int epoch, const Metrics&) {
    ++calls;
    return static_cast<double>(epoch);
  };
  const TrainHistory h = train(m, head(fixtures().train, 16), head(fixtures().validation, 8), hooks);
  CHECK(h.epochs.size() == 2);
  CHECK(calls == 2);
  CHECK(h.best_epoch == 2);
  CHECK_FALSE(h.stopped_early);
}

TEST_CASE("best weights are restored") {
  ModelConfig c = fixture_model_config(2);
  c.patience = 3;
  c.lr = 0.01;
  Model m = fixture_model(c);
  TrainHooks hooks;
  hooks.monitor = [](int epoch, const Metrics&) { return epoch <= 2 ? epoch : 0.0; };
  std::vector<Tensor> snapshot;
  hooks.on_epoch_end = [&](const Model& model, const EpochRecord& r, bool improved) {
    if (r.epoch == 2) {
      CHECK(improved);
      snapshot.clear();
      for (const Parameter* p : model.parameters()) snapshot.push_back(p->value);
    }
  };
  const TrainHistory h = train(m, head(fixtures().train, 24), head(fixtures().validation, 8), hooks);
  CHECK(h.best_epoch == 2);
  CHECK(h.epochs.size() == 5);
  const auto params = m.parameters();
  REQUIRE(params.size() == snapshot.size());
  for (std::size_t i = 0; i < params.size(); ++i) CHECK(params[i]->value == snapshot[i]);
}

TEST_CASE("same seed gives identical histories") {
  auto run = [] {
    ModelConfig c = fixture_model_config(9);
    c.max_epochs = 3;
    c.patience = 3;
    Model m = fixture_model(c);
    const TrainHistory h = train(m, head(fixtures().train, 40), head(fixtures().validation, 10));
    return format_history(h);
  };
  const std::string a = run();
  CHECK(a == run());
  CHECK(a.rfind("epoch\ttrain_loss\tprecision\trecall\tf1\tmonitored\n", 0) == 0);
  CHECK(a.find("# best_epoch") != std::string::npos);
}

TEST_CASE("loss on a fixed batch falls over the first epochs") {
  ModelConfig c = fixture_model_config(1);
  c.max_epochs = 5;
  c.patience = 5;
  Model m = fixture_model(c);
  std::vector<EncodedSentence> fixed;
  for (const Sentence& s : head(fixtures().train, 8)) fixed.push_back(encode(s, m.words, m.chars));
  auto batch_loss = [&](const Model& model) {
    double total = 0;
    for (const auto& e : fixed) total += sentence_loss(model, e);
    return total / static_cast<double>(fixed.size());
  };
  std::vector<double> losses{batch_loss(m)};
  TrainHooks hooks;
  hooks.monitor = [](int epoch, const Metrics&) { return static_cast<double>(epoch); };
  hooks.on_epoch_end = [&](const Model& model, const EpochRecord&, bool) {
    losses.push_back(batch_loss(model));
  };
  const TrainHistory h = train(m, fixtures().train, fixtures().validation, hooks);
  REQUIRE(losses.size() == 6);
  for (std::size_t i = 1; i < losses.size(); ++i) {
    INFO("epoch " << i << ": " << losses[i - 1] << " -> " << losses[i]);
    CHECK(losses[i] < losses[i - 1]);
  }
  for (std::size_t i = 1; i < h.epochs.size(); ++i)
    CHECK(h.epochs[i].train_loss < h.epochs[0].train_loss);
}

TEST_CASE("early stopping bound") {
  ModelConfig c = fixture_model_config(4);
  c.max_epochs = 12;
  c.patience = 2;
  Model m = fixture_model(c);
  const TrainHistory h = train(m, head(fixtures().train, 40), head(fixtures().validation, 10));
  CHECK(static_cast<int>(h.epochs.size()) <= h.best_epoch + c.patience);
  CHECK(static_cast<int>(h.epochs.size()) <= c.max_epochs);
  double best = -1;
  for (const EpochRecord& r : h.epochs) best = std::max(best, r.monitored);
  CHECK(h.best_score == best);
  CHECK(h.epochs[static_cast<std::size_t>(h.best_epoch - 1)].monitored == best);
}

TEST_CASE("empty inputs are rejected") {
  Model m = fixture_model(fixture_model_config(1));
  CHECK_THROWS_AS(train(m, {}, fixtures().validation), ValidationError);
  CHECK_THROWS_AS(train(m, fixtures().train, {}), ValidationError);
}
