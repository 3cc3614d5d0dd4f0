#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dsner/corpus.hpp"
#include "dsner/crf.hpp"
#include "dsner/lstm.hpp"
#include "dsner/vocab.hpp"

namespace dsner {

// Defaults: 100-d word vectors, dropout 0.5, two 300-unit Bi-LSTM layers,
// Adam at 1e-3 with L2 0.01, batches of 64, 50 epochs, patience 10, 80-unit
// char LSTM.
struct ModelConfig {
  int word_dim = 100;
  int char_dim = 25;
  int char_hidden = 80;
  int encoder_hidden = 300;
  int encoder_layers = 2;
  double dropout = 0.5;
  double lr = 0.001;
  double l2 = 0.01;
  int batch_size = 64;
  int max_epochs = 50;
  int patience = 10;
  std::uint64_t seed = 1;
  std::string pretrained_path;
  int min_count = 1;
  double init_scale = 0.1;
  double clip_norm = 0.0;  // 0 disables gradient clipping

  void validate() const;  // throws ConfigError
  bool operator==(const ModelConfig&) const = default;
};

// Character Bi-LSTM + word embedding -> stacked Bi-LSTM -> dense -> CRF.
struct Model {
  ModelConfig config;
  Vocabulary words;
  Vocabulary chars;
  EmbeddingMatrix word_table;
  EmbeddingMatrix char_table;
  BiLstmLayer char_layer;
  std::vector<BiLstmLayer> encoder;
  Parameter dense_w;  // 2H x K
  Parameter dense_b;  // 1 x K
  CrfParams crf;

  // Zero-valued parameters with the shapes implied by config and vocabularies.
  static Model allocate(const ModelConfig& config, Vocabulary words, Vocabulary chars);
  // Randomly initialized from config.seed; word vectors come from
  // config.pretrained_path when set.
  static Model create(const ModelConfig& config, Vocabulary words, Vocabulary chars);

  // Fixed order; checkpoints and optimizer state rely on it.
  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;

  int encoder_input_dim() const { return config.word_dim + 2 * config.char_hidden; }
};

struct SentenceTrace {
  std::vector<int> word_ids;
  std::vector<CharEncodeTrace> chars;
  EncoderTrace encoder;
  Tensor encoded;
};

// n x K emission scores for one sentence.
Tensor forward_sentence(const Model& model, const EncodedSentence& sentence, bool training,
                        Rng& rng, SentenceTrace* trace = nullptr);

// Per-sentence emissions; sentences of any lengths may share a batch.
std::vector<Tensor> forward(const Model& model, const std::vector<EncodedSentence>& batch,
                            bool training, Rng& rng);

// Backpropagates d(emissions) into every parameter gradient.
void backward_sentence(Model& model, const SentenceTrace& trace, const Tensor& d_emissions);

// CRF negative log-likelihood of the gold tags; adds scale * gradient into
// the parameters.
double loss_and_gradient(Model& model, const EncodedSentence& sentence, bool training, Rng& rng,
                         double scale = 1.0);
double sentence_loss(const Model& model, const EncodedSentence& sentence);

// Constrained Viterbi labels for each sentence (inference mode).
std::vector<std::vector<Tag>> predict_tags(const Model& model,
                                           const std::vector<EncodedSentence>& sentences);

struct Prediction {
  std::vector<std::vector<MentionSpan>> spans;
  std::size_t skipped = 0;  // empty sentences, given no spans
};

Prediction predict(const Model& model, const std::vector<std::vector<std::string>>& sentences);
Prediction predict(const Model& model, const std::vector<Sentence>& sentences);

}  // namespace dsner
