// Command-line front end: train, eval, predict, gradcheck, fixtures generate.

#include <CLI11.hpp>
#include <iostream>
#include <optional>

#include "dsner/commands.hpp"
#include "dsner/config.hpp"

namespace {

struct TrainFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> word_dim, char_dim, char_hidden, encoder_hidden, encoder_layers;
  std::optional<int> batch_size, max_epochs, patience;
  std::optional<double> dropout, lr, l2;
  std::optional<std::string> pretrained, train, validation, test, checkpoint, report;
};

dsner::RunConfig resolve(const TrainFlags& f) {
  dsner::RunConfig c = dsner::read_run_config(f.config_path);
  auto set = [](auto& field, const auto& flag) {
    if (flag) field = *flag;
  };
  set(c.model.seed, f.seed);
  set(c.model.word_dim, f.word_dim);
  set(c.model.char_dim, f.char_dim);
  set(c.model.char_hidden, f.char_hidden);
  set(c.model.encoder_hidden, f.encoder_hidden);
  set(c.model.encoder_layers, f.encoder_layers);
  set(c.model.batch_size, f.batch_size);
  set(c.model.max_epochs, f.max_epochs);
  set(c.model.patience, f.patience);
  set(c.model.dropout, f.dropout);
  set(c.model.lr, f.lr);
  set(c.model.l2, f.l2);
  set(c.model.pretrained_path, f.pretrained);
  set(c.train_path, f.train);
  set(c.validation_path, f.validation);
  set(c.test_path, f.test);
  set(c.checkpoint_path, f.checkpoint);
  set(c.report_path, f.report);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dataset mention tagger (Bi-LSTM-CRF)"};
  app.require_subcommand(1);

  TrainFlags tf;
  auto* train = app.add_subcommand("train", "Train a model from a key = value config file");
  train->add_option("--config", tf.config_path, "Run config file")->required();
  train->add_option("--seed", tf.seed);
  train->add_option("--word-dim", tf.word_dim)->check(CLI::IsMember({50, 100, 200, 300}));
  train->add_option("--char-dim", tf.char_dim);
  train->add_option("--char-hidden", tf.char_hidden);
  train->add_option("--encoder-hidden", tf.encoder_hidden);
  train->add_option("--encoder-layers", tf.encoder_layers);
  train->add_option("--batch-size", tf.batch_size);
  train->add_option("--max-epochs", tf.max_epochs);
  train->add_option("--patience", tf.patience);
  train->add_option("--dropout", tf.dropout);
  train->add_option("--lr", tf.lr);
  train->add_option("--l2", tf.l2);
  train->add_option("--pretrained", tf.pretrained, "GloVe-format text vectors");
  train->add_option("--train", tf.train);
  train->add_option("--validation", tf.validation);
  train->add_option("--test", tf.test);
  train->add_option("--checkpoint", tf.checkpoint);
  train->add_option("--report", tf.report);

  std::string checkpoint, corpus, gold, pred;
  auto* eval = app.add_subcommand("eval", "Span-exact precision/recall/F1");
  eval->add_option("--checkpoint", checkpoint);
  eval->add_option("--corpus", corpus);
  eval->add_option("--gold", gold, "Gold CoNLL file (scores --pred without a model)");
  eval->add_option("--pred", pred, "Predicted CoNLL file");

  std::string in_path, out_path;
  auto* predict = app.add_subcommand("predict", "Tag a tokenized file");
  predict->add_option("--checkpoint", checkpoint)->required();
  predict->add_option("--in", in_path)->required();
  predict->add_option("--out", out_path)->required();

  bool corrupt = false;
  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference gradient check");
  gradcheck->add_flag("--corrupt-gradient", corrupt)->group("");

  std::string fixture_dir;
  std::uint64_t fixture_seed = 7;
  auto* fixtures = app.add_subcommand("fixtures", "Synthetic corpora");
  fixtures->require_subcommand(1);
  auto* generate = fixtures->add_subcommand("generate", "Write the planted-pattern corpus");
  generate->add_option("--out", fixture_dir)->required();
  generate->add_option("--seed", fixture_seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : dsner::kExitUsage;
  }

  if (*train) {
    dsner::RunConfig cfg;
    try {
      cfg = resolve(tf);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return dsner::exit_code_for(e);
    }
    return dsner::cmd_train(cfg, std::cout, std::cerr);
  }
  if (*eval) {
    if (!gold.empty() || !pred.empty()) {
      if (gold.empty() || pred.empty()) {
        std::cerr << "error: --gold and --pred go together\n";
        return dsner::kExitUsage;
      }
      return dsner::cmd_eval_files(gold, pred, std::cout, std::cerr);
    }
    if (checkpoint.empty() || corpus.empty()) {
      std::cerr << "error: eval needs --checkpoint and --corpus (or --gold and --pred)\n";
      return dsner::kExitUsage;
    }
    return dsner::cmd_eval(checkpoint, corpus, std::cout, std::cerr);
  }
  if (*predict) return dsner::cmd_predict(checkpoint, in_path, out_path, std::cout, std::cerr);
  if (*gradcheck) return dsner::cmd_gradcheck(corrupt, std::cout, std::cerr);
  if (*generate) return dsner::cmd_fixtures_generate(fixture_dir, fixture_seed, std::cout, std::cerr);
  return dsner::kExitUsage;
}
