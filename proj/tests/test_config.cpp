#include <doctest.h>

#include "dsner/config.hpp"

using namespace dsner;

TEST_CASE("defaults") {
  const RunConfig c = parse_run_config("");
  CHECK(c.model.word_dim == 100);
  CHECK(c.model.encoder_hidden == 300);
  CHECK(c.model.encoder_layers == 2);
  CHECK(c.model.dropout == 0.5);
  CHECK(c.model.lr == 0.001);
  CHECK(c.model.l2 == 0.01);
  CHECK(c.model.batch_size == 64);
  CHECK(c.model.max_epochs == 50);
  CHECK(c.model.patience == 10);
  CHECK(c.model.char_hidden == 80);
  CHECK(c.model.char_dim == 25);
  CHECK(c.checkpoint_path == "model.ckpt");
}

TEST_CASE("round-trip is lossless") {
  RunConfig c;
  c.model.word_dim = 50;
  c.model.dropout = 0.1 + 0.2;  // not exactly representable in short form
  c.model.lr = 1.0 / 3.0;
  c.model.seed = 18446744073709551615ull;
  c.model.pretrained_path = "/data/glove 6B.txt";
  c.train_path = "a.conll";
  c.validation_path = "";
  c.report_path = "out/history.tsv";
  const std::string text = write_run_config(c);
  CHECK(parse_run_config(text) == c);
  CHECK(write_run_config(parse_run_config(text)) == text);
  CHECK(parse_model_config(write_model_config(c.model)) == c.model);
}

TEST_CASE("parsing") {
  const RunConfig c = parse_run_config("# comment\n\n  word_dim =  200 \r\nlr=0.5\n");
  CHECK(c.model.word_dim == 200);
  CHECK(c.model.lr == 0.5);

  CHECK_THROWS_AS(parse_run_config("colour = blue\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("word_dim = many\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("word_dim = 12x\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("just a line\n"), ConfigError);
  CHECK_THROWS_AS(parse_model_config("train_path = x\n"), ConfigError);
  CHECK_THROWS_AS(read_run_config("/nonexistent/dsner.cfg"), ConfigError);

  RunConfig o;
  apply_setting(o, "seed", "7");
  apply_setting(o, "checkpoint_path", "m.ckpt");
  CHECK(o.model.seed == 7);
  CHECK(o.checkpoint_path == "m.ckpt");
}
