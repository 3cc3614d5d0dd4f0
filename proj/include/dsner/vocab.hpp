#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dsner/corpus.hpp"
#include "dsner/tensor.hpp"

namespace dsner {

// Token <-> id map with PAD = 0 and UNK = 1 always present. Ids are assigned
// in first-insertion order.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr std::string_view kPadToken = "<PAD>";
  static constexpr std::string_view kUnkToken = "<UNK>";

  Vocabulary();
  // Rebuilds from a full id-ordered token list (reserved entries included).
  static Vocabulary from_tokens(const std::vector<std::string>& tokens);

  int add(const std::string& token);
  std::optional<int> find(std::string_view token) const;
  // Exact match, then lowercase fallback, then UNK.
  int lookup(std::string_view token) const;
  const std::string& token(int id) const;

  int size() const { return static_cast<int>(tokens_.size()); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
};

std::string to_lower_ascii(std::string_view s);
// Splits a UTF-8 string into code points (each as its byte sequence). Stray
// bytes become single-byte characters.
std::vector<std::string> utf8_chars(std::string_view s);

Vocabulary build_word_vocab(const std::vector<Sentence>& sentences, int min_count = 1);
Vocabulary build_char_vocab(const std::vector<Sentence>& sentences);

// |V| x d table; the PAD row is zero and excluded from updates.
struct EmbeddingMatrix {
  Parameter table;
  bool trainable = true;

  Eigen::Index dim() const { return table.value.cols(); }
  Eigen::Index rows() const { return table.value.rows(); }
};

EmbeddingMatrix random_embedding(std::string name, const Vocabulary& vocab, int dim,
                                 double init_scale, Rng& rng);

struct PretrainedLoad {
  EmbeddingMatrix matrix;
  int covered = 0;  // vocabulary rows copied from the file
};

// GloVe text layout: `token v1 ... vd` per line. Rows not found in the file
// (and UNK) draw from uniform(-init_scale, init_scale) in row order.
PretrainedLoad load_pretrained(const std::string& path, int dim, const Vocabulary& vocab,
                               double init_scale, Rng& rng, std::string name = "word_embedding");

struct EncodedSentence {
  std::vector<int> word_ids;
  std::vector<std::vector<int>> char_ids;
  std::vector<int> tag_ids;  // empty for unlabeled input

  std::size_t size() const { return word_ids.size(); }
};

EncodedSentence encode(const Sentence& sentence, const Vocabulary& words, const Vocabulary& chars);
EncodedSentence encode_tokens(const std::vector<std::string>& tokens, const Vocabulary& words,
                              const Vocabulary& chars);

// Row i of the result is table row ids[i].
Tensor lookup(const EmbeddingMatrix& matrix, const std::vector<int>& ids);
// Scatter-adds dy rows into the table gradient; the frozen row is skipped.
void lookup_backward(EmbeddingMatrix& matrix, const std::vector<int>& ids, const Tensor& dy);

}  // namespace dsner
