#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "dsner/checkpoint.hpp"
#include "dsner/gradcheck.hpp"
#include "dsner/model.hpp"
#include "dsner/train.hpp"

using namespace dsner;

namespace {

Sentence tagged(const std::string& text, const std::string& tags) {
  Sentence s;
  std::istringstream a(text), b(tags);
  std::string tok, tag;
  while (a >> tok && b >> tag) {
    s.tokens.push_back(tok);
    s.tags.push_back(tag_from_string(tag == "O" ? tag : tag + "-DS"));
  }
  return s;
}

const std::vector<Sentence>& toy_corpus() {
  static const std::vector<Sentence> corpus{
      tagged("the Monitoring the Future ( MTF )", "O B I I O B O"),
      tagged("data from the Panel Study of Income Dynamics ( PSID ) .", "O O O B I I I I O B O O"),
      tagged("we used survey results .", "O O O O O"),
      tagged("the National Health Survey was large .", "O B I I O O O"),
  };
  return corpus;
}

ModelConfig small_config() {
  ModelConfig c;
  c.word_dim = 8;
  c.char_dim = 6;
  c.char_hidden = 5;
  c.encoder_hidden = 7;
  c.encoder_layers = 2;
  c.dropout = 0.0;
  return c;
}

Model small_model(std::uint64_t seed = 1) {
  ModelConfig c = small_config();
  c.seed = seed;
  return Model::create(c, build_word_vocab(toy_corpus()), build_char_vocab(toy_corpus()));
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("dsner_model_" + name)).string();
}

}  // namespace

TEST_CASE("ModelConfig validation") {
  ModelConfig c;
  CHECK_NOTHROW(c.validate());
  c.dropout = 1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.patience = c.max_epochs + 1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.encoder_hidden = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("forward shapes and zero weights") {
  const Model m = small_model();
  Rng rng(1);
  const EncodedSentence six = encode_tokens({"a", "b", "c", "d", "e", "f"}, m.words, m.chars);
  const Tensor em = forward_sentence(m, six, false, rng);
  CHECK(em.rows() == 6);
  CHECK(em.cols() == kNumTags);
  CHECK(m.encoder_input_dim() == 8 + 2 * 5);

  Model zero = Model::allocate(m.config, m.words, m.chars);
  zero.dense_b.value << 0.5, -1.0, 2.0;
  const Tensor z = forward_sentence(zero, six, false, rng);
  for (Eigen::Index r = 0; r < z.rows(); ++r) CHECK(z.row(r) == zero.dense_b.value);
}

TEST_CASE("batched forward equals single-sentence forwards") {
  const Model m = small_model();
  const std::vector<EncodedSentence> batch{encode(toy_corpus()[2], m.words, m.chars),
                                           encode(toy_corpus()[0], m.words, m.chars)};
  Rng rng(1);
  const std::vector<Tensor> together = forward(m, batch, false, rng);
  REQUIRE(together.size() == 2);
  CHECK(together[0].rows() == 5);
  CHECK(together[1].rows() == 7);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Tensor alone = forward_sentence(m, batch[i], false, rng);
    CHECK((alone - together[i]).cwiseAbs().maxCoeff() <= 1e-9);
  }

  // Prediction does not depend on which other sentences are decoded with it.
  std::vector<EncodedSentence> all;
  for (const Sentence& s : toy_corpus()) all.push_back(encode(s, m.words, m.chars));
  const auto joint = predict_tags(m, all);
  for (std::size_t i = 0; i < all.size(); ++i) CHECK(predict_tags(m, {all[i]})[0] == joint[i]);
}

TEST_CASE("end-to-end gradient check") {
  for (int layers : {1, 2}) {
    ModelGradCheckOptions opt;
    opt.encoder_layers = layers;
    const GradCheckReport report = model_gradient_check(opt);
    CHECK(report.max_rel_error < 1e-4);
    // Every parameter group is covered.
    CHECK(report.entries.size() == tiny_model(opt.seed, layers).parameters().size());
  }
  ModelGradCheckOptions corrupted;
  corrupted.corrupt = true;
  CHECK(model_gradient_check(corrupted).max_rel_error > 1e-2);
}

TEST_CASE("untrained predictions are IOB-valid") {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    const Model m = small_model(seed);
    std::vector<EncodedSentence> all;
    for (const Sentence& s : toy_corpus()) all.push_back(encode(s, m.words, m.chars));
    for (const auto& tags : predict_tags(m, all)) CHECK(is_iob_valid(tags));
  }
}

TEST_CASE("predict skips empty sentences") {
  const Model m = small_model();
  const Prediction p = predict(m, std::vector<std::vector<std::string>>{{}, {"the", "MTF"}});
  CHECK(p.spans.size() == 2);
  CHECK(p.spans[0].empty());
  CHECK(p.skipped == 1);
}

TEST_CASE("checkpoint round-trip") {
  Model m = small_model(5);
  // Non-default settings must survive too.
  m.config.lr = 0.0123456789012345678;
  m.config.pretrained_path = "vectors with spaces.txt";
  const std::string path = temp_path("roundtrip.ckpt");
  save_checkpoint(m, path);
  const Model back = load_checkpoint(path);
  CHECK(back.config == m.config);
  CHECK(back.words == m.words);
  CHECK(back.chars == m.chars);
  const auto a = m.parameters();
  const auto b = back.parameters();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i]->name == b[i]->name);
    CHECK(a[i]->value == b[i]->value);
  }
  CHECK(serialize_model(back) == serialize_model(m));

  std::vector<Sentence> s = toy_corpus();
  CHECK(predict(back, s).spans == predict(m, s).spans);
  CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
}

TEST_CASE("corrupted checkpoints fail cleanly") {
  const Model m = small_model();
  const std::string bytes = serialize_model(m);

  SUBCASE("truncated") {
    for (std::size_t cut : {std::size_t{0}, std::size_t{5}, std::size_t{20}, bytes.size() / 2,
                            bytes.size() - 1}) {
      CHECK_THROWS_AS(deserialize_model(bytes.substr(0, cut)), LoadError);
    }
    const std::string path = temp_path("truncated.ckpt");
    std::ofstream(path, std::ios::binary) << bytes.substr(0, bytes.size() / 3);
    CHECK_THROWS_AS(load_checkpoint(path), LoadError);
  }
  SUBCASE("version mismatch") {
    std::string other = bytes;
    other[8] = static_cast<char>(kCheckpointVersion + 1);
    try {
      deserialize_model(other);
      FAIL("expected LoadError");
    } catch (const LoadError& e) {
      CHECK(std::string(e.what()).find("version") != std::string::npos);
    }
  }
  SUBCASE("bad magic") {
    std::string other = bytes;
    other[0] = 'X';
    CHECK_THROWS_AS(deserialize_model(other), LoadError);
  }
  SUBCASE("flipped payload byte") {
    std::string other = bytes;
    other[bytes.size() / 2] ^= 0x40;
    CHECK_THROWS_AS(deserialize_model(other), LoadError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_checkpoint(temp_path("does_not_exist.ckpt")), LoadError);
  }
}

TEST_CASE("overfits a planted sentence") {
  ModelConfig c = small_config();
  c.word_dim = 16;
  c.char_hidden = 8;
  c.encoder_hidden = 16;
  c.encoder_layers = 1;
  c.lr = 0.01;
  c.l2 = 0.0;
  c.batch_size = 2;
  c.max_epochs = 40;
  c.patience = 40;
  c.seed = 3;
  const std::vector<Sentence>& data = toy_corpus();
  Model m = Model::create(c, build_word_vocab(data), build_char_vocab(data));
  const TrainHistory h = train(m, data, data);
  CHECK(h.best_score == 1.0);

  const Prediction p = predict(m, std::vector<std::vector<std::string>>{
                                      {"the", "Monitoring", "the", "Future", "(", "MTF", ")"}});
  CHECK(p.spans[0] == std::vector<MentionSpan>{{1, 4}, {5, 6}});
}
