#include "dsner/model.hpp"

#include "dsner/log.hpp"
#include "dsner/ops.hpp"

namespace dsner {

void ModelConfig::validate() const {
  auto positive = [](int v, const char* key) {
    if (v <= 0) throw ConfigError(std::string(key) + " must be positive");
  };
  positive(word_dim, "word_dim");
  positive(char_dim, "char_dim");
  positive(char_hidden, "char_hidden");
  positive(encoder_hidden, "encoder_hidden");
  positive(encoder_layers, "encoder_layers");
  positive(batch_size, "batch_size");
  positive(max_epochs, "max_epochs");
  positive(patience, "patience");
  positive(min_count, "min_count");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must lie in [0, 1)");
  if (!(lr > 0.0)) throw ConfigError("lr must be positive");
  if (!(l2 >= 0.0)) throw ConfigError("l2 must be non-negative");
  if (!(init_scale > 0.0)) throw ConfigError("init_scale must be positive");
  if (!(clip_norm >= 0.0)) throw ConfigError("clip_norm must be non-negative");
  if (patience > max_epochs) throw ConfigError("patience must not exceed max_epochs");
}

Model Model::allocate(const ModelConfig& config, Vocabulary words, Vocabulary chars) {
  config.validate();
  Model m;
  m.config = config;
  m.words = std::move(words);
  m.chars = std::move(chars);

  auto table = [](std::string name, const Vocabulary& v, int dim) {
    EmbeddingMatrix e{Parameter(std::move(name), Tensor::Zero(v.size(), dim)), true};
    e.table.row_sparse = true;
    e.table.frozen_row = Vocabulary::kPad;
    return e;
  };
  m.word_table = table("word_embedding", m.words, config.word_dim);
  m.char_table = table("char_embedding", m.chars, config.char_dim);
  m.char_layer = BiLstmLayer::zeros("char_lstm", config.char_dim, config.char_hidden);
  int in_dim = m.encoder_input_dim();
  for (int k = 0; k < config.encoder_layers; ++k) {
    m.encoder.push_back(
        BiLstmLayer::zeros("encoder." + std::to_string(k), in_dim, config.encoder_hidden));
    in_dim = 2 * config.encoder_hidden;
  }
  m.dense_w = Parameter("dense.w", Tensor::Zero(in_dim, kNumTags));
  m.dense_b = Parameter("dense.b", Tensor::Zero(1, kNumTags));
  m.crf = CrfParams::zeros(kNumTags);
  return m;
}

Model Model::create(const ModelConfig& config, Vocabulary words, Vocabulary chars) {
  Model m = allocate(config, std::move(words), std::move(chars));
  Rng rng(config.seed);
  if (!config.pretrained_path.empty()) {
    PretrainedLoad loaded =
        load_pretrained(config.pretrained_path, config.word_dim, m.words, config.init_scale, rng);
    log_info("pretrained vectors cover " + std::to_string(loaded.covered) + " of " +
             std::to_string(m.words.size() - 2) + " words");
    m.word_table = std::move(loaded.matrix);
  } else {
    m.word_table = random_embedding("word_embedding", m.words, config.word_dim, config.init_scale, rng);
  }
  m.char_table = random_embedding("char_embedding", m.chars, config.char_dim, config.init_scale, rng);
  m.char_layer = BiLstmLayer::init("char_lstm", config.char_dim, config.char_hidden, rng);
  int in_dim = m.encoder_input_dim();
  for (int k = 0; k < config.encoder_layers; ++k) {
    m.encoder[static_cast<std::size_t>(k)] =
        BiLstmLayer::init("encoder." + std::to_string(k), in_dim, config.encoder_hidden, rng);
    in_dim = 2 * config.encoder_hidden;
  }
  m.dense_w.value = glorot_uniform(in_dim, kNumTags, rng);
  return m;
}

std::vector<Parameter*> Model::parameters() {
  std::vector<Parameter*> out{&word_table.table, &char_table.table};
  for (Parameter* p : char_layer.parameters()) out.push_back(p);
  for (BiLstmLayer& layer : encoder)
    for (Parameter* p : layer.parameters()) out.push_back(p);
  out.push_back(&dense_w);
  out.push_back(&dense_b);
  for (Parameter* p : crf.parameters()) out.push_back(p);
  return out;
}

std::vector<const Parameter*> Model::parameters() const {
  std::vector<const Parameter*> out;
  for (Parameter* p : const_cast<Model*>(this)->parameters()) out.push_back(p);
  return out;
}

Tensor forward_sentence(const Model& model, const EncodedSentence& sentence, bool training,
                        Rng& rng, SentenceTrace* trace) {
  const auto n = static_cast<Eigen::Index>(sentence.size());
  if (n == 0) throw ValidationError("cannot run the model on an empty sentence");
  if (sentence.char_ids.size() != sentence.word_ids.size()) {
    throw ShapeError("encoded sentence has mismatched word and character lists");
  }
  const int wd = model.config.word_dim;
  const int cd = 2 * model.config.char_hidden;

  Tensor input(n, wd + cd);
  input.leftCols(wd) = lookup(model.word_table, sentence.word_ids);
  if (trace) {
    trace->word_ids = sentence.word_ids;
    trace->chars.assign(static_cast<std::size_t>(n), {});
  }
  for (Eigen::Index t = 0; t < n; ++t) {
    const auto i = static_cast<std::size_t>(t);
    input.row(t).rightCols(cd) = char_encode_word(sentence.char_ids[i], model.char_table,
                                                  model.char_layer,
                                                  trace ? &trace->chars[i] : nullptr);
  }

  Tensor encoded = stacked_encode(input, model.encoder, model.config.dropout, training, rng,
                                  trace ? &trace->encoder : nullptr);
  Tensor emissions = affine(encoded, model.dense_w.value, model.dense_b.value);
  if (trace) trace->encoded = std::move(encoded);
  return emissions;
}

std::vector<Tensor> forward(const Model& model, const std::vector<EncodedSentence>& batch,
                            bool training, Rng& rng) {
  if (batch.empty()) throw ValidationError("empty batch");
  std::vector<Tensor> out;
  out.reserve(batch.size());
  for (const EncodedSentence& s : batch) out.push_back(forward_sentence(model, s, training, rng));
  return out;
}

void backward_sentence(Model& model, const SentenceTrace& trace, const Tensor& d_emissions) {
  const Tensor d_encoded =
      affine_backward(trace.encoded, model.dense_w.value, d_emissions, model.dense_w.grad,
                      model.dense_b.grad);
  const Tensor d_input = stacked_encode_backward(trace.encoder, model.encoder, d_encoded);
  const int wd = model.config.word_dim;
  const int cd = 2 * model.config.char_hidden;
  lookup_backward(model.word_table, trace.word_ids, d_input.leftCols(wd));
  for (std::size_t t = 0; t < trace.chars.size(); ++t) {
    char_encode_backward(trace.chars[t], model.char_table, model.char_layer,
                         d_input.row(static_cast<Eigen::Index>(t)).rightCols(cd));
  }
}

double loss_and_gradient(Model& model, const EncodedSentence& sentence, bool training, Rng& rng,
                         double scale) {
  SentenceTrace trace;
  const Tensor em = forward_sentence(model, sentence, training, rng, &trace);
  Tensor d_em;
  const double loss = nll_loss_backward(em, sentence.tag_ids, model.crf, d_em, scale);
  if (!std::isfinite(loss)) throw NumericError("non-finite sentence loss");
  backward_sentence(model, trace, d_em);
  return loss;
}

double sentence_loss(const Model& model, const EncodedSentence& sentence) {
  Rng unused(0);
  return nll_loss(forward_sentence(model, sentence, false, unused), sentence.tag_ids, model.crf);
}

std::vector<std::vector<Tag>> predict_tags(const Model& model,
                                           const std::vector<EncodedSentence>& sentences) {
  Rng unused(0);
  std::vector<std::vector<Tag>> out;
  out.reserve(sentences.size());
  for (const EncodedSentence& s : sentences) {
    std::vector<Tag> tags;
    if (s.size() > 0) {
      const Decoded d = viterbi_decode(forward_sentence(model, s, false, unused), model.crf, true);
      for (int id : d.tags) tags.push_back(tag_from_id(id));
    }
    out.push_back(std::move(tags));
  }
  return out;
}

Prediction predict(const Model& model, const std::vector<std::vector<std::string>>& sentences) {
  std::vector<EncodedSentence> encoded;
  Prediction p;
  for (const auto& tokens : sentences) {
    if (tokens.empty()) ++p.skipped;
    encoded.push_back(encode_tokens(tokens, model.words, model.chars));
  }
  if (p.skipped > 0) log_warn("skipped " + std::to_string(p.skipped) + " empty sentence(s)");
  for (const auto& tags : predict_tags(model, encoded)) p.spans.push_back(tags_to_spans(tags));
  return p;
}

Prediction predict(const Model& model, const std::vector<Sentence>& sentences) {
  std::vector<std::vector<std::string>> tokens;
  tokens.reserve(sentences.size());
  for (const Sentence& s : sentences) tokens.push_back(s.tokens);
  return predict(model, tokens);
}

}  // namespace dsner
