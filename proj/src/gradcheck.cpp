#include "dsner/gradcheck.hpp"

namespace dsner {

Sentence tiny_sentence() { return {{"from", "MTF", "data"}, {Tag::O, Tag::B, Tag::I}}; }

Model tiny_model(std::uint64_t seed, int encoder_layers) {
  const std::vector<Sentence> corpus{tiny_sentence()};
  ModelConfig cfg;
  cfg.word_dim = 4;
  cfg.char_dim = 3;
  cfg.char_hidden = 2;
  cfg.encoder_hidden = 3;
  cfg.encoder_layers = encoder_layers;
  cfg.dropout = 0.0;
  cfg.seed = seed;
  cfg.max_epochs = 1;
  cfg.patience = 1;
  cfg.init_scale = 0.5;
  Model m = Model::create(cfg, build_word_vocab(corpus), build_char_vocab(corpus));
  // Non-zero biases and CRF scores so every gradient path is exercised.
  Rng rng(seed + 1);
  for (Parameter* p : m.parameters()) {
    if (p->name.ends_with(".bias") || p->name.starts_with("crf.") || p->name == "dense.b") {
      p->value += uniform(p->value.rows(), p->value.cols(), 0.5, rng);
    }
  }
  return m;
}

GradCheckReport model_gradient_check(const ModelGradCheckOptions& options) {
  Model model = tiny_model(options.seed, options.encoder_layers);
  const EncodedSentence enc = encode(tiny_sentence(), model.words, model.chars);
  const auto params = model.parameters();

  for (Parameter* p : params) p->zero_grad();
  Rng rng(options.seed);
  loss_and_gradient(model, enc, false, rng);
  if (options.corrupt) model.dense_w.grad(0, 0) += 0.1;

  return grad_check([&] { return sentence_loss(model, enc); }, params, options.eps);
}

}  // namespace dsner
