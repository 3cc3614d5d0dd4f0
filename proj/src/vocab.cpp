#include "dsner/vocab.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "dsner/errors.hpp"

namespace dsner {

Vocabulary::Vocabulary() {
  add(std::string(kPadToken));
  add(std::string(kUnkToken));
}

Vocabulary Vocabulary::from_tokens(const std::vector<std::string>& tokens) {
  if (tokens.size() < 2 || tokens[kPad] != kPadToken || tokens[kUnk] != kUnkToken) {
    throw ValidationError("vocabulary must start with the PAD and UNK entries");
  }
  Vocabulary v;
  for (std::size_t i = 2; i < tokens.size(); ++i) {
    if (v.find(tokens[i])) throw ValidationError("duplicate vocabulary entry '" + tokens[i] + "'");
    v.add(tokens[i]);
  }
  return v;
}

int Vocabulary::add(const std::string& token) {
  auto [it, inserted] = ids_.try_emplace(token, static_cast<int>(tokens_.size()));
  if (inserted) tokens_.push_back(token);
  return it->second;
}

std::optional<int> Vocabulary::find(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

int Vocabulary::lookup(std::string_view token) const {
  if (auto id = find(token)) return *id;
  if (auto id = find(to_lower_ascii(token))) return *id;
  return kUnk;
}

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || id >= size()) throw IndexError("vocabulary id out of range: " + std::to_string(id));
  return tokens_[static_cast<std::size_t>(id)];
}

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

std::vector<std::string> utf8_chars(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto lead = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    if (lead >= 0xF0 && lead < 0xF8) len = 4;
    else if (lead >= 0xE0) len = 3;
    else if (lead >= 0xC0) len = 2;
    if (len > 1) {
      if (i + len > s.size()) len = 1;
      for (std::size_t k = 1; k < len; ++k)
        if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) len = 1;
    }
    out.emplace_back(s.substr(i, len));
    i += len;
  }
  return out;
}

Vocabulary build_word_vocab(const std::vector<Sentence>& sentences, int min_count) {
  if (min_count < 1) throw ValidationError("min_count must be at least 1");
  if (sentences.empty()) throw ValidationError("cannot build a vocabulary from an empty corpus");
  std::vector<std::string> order;
  std::unordered_map<std::string, int> counts;
  for (const Sentence& s : sentences)
    for (const std::string& tok : s.tokens)
      if (counts[tok]++ == 0) order.push_back(tok);
  Vocabulary v;
  for (const std::string& tok : order)
    if (counts[tok] >= min_count) v.add(tok);
  return v;
}

Vocabulary build_char_vocab(const std::vector<Sentence>& sentences) {
  if (sentences.empty()) throw ValidationError("cannot build a vocabulary from an empty corpus");
  Vocabulary v;
  for (const Sentence& s : sentences)
    for (const std::string& tok : s.tokens)
      for (const std::string& ch : utf8_chars(tok)) v.add(ch);
  return v;
}

EmbeddingMatrix random_embedding(std::string name, const Vocabulary& vocab, int dim,
                                 double init_scale, Rng& rng) {
  if (dim <= 0) throw ConfigError("embedding dimension must be positive");
  EmbeddingMatrix m{Parameter(std::move(name), uniform(vocab.size(), dim, init_scale, rng)), true};
  m.table.value.row(Vocabulary::kPad).setZero();
  m.table.row_sparse = true;
  m.table.frozen_row = Vocabulary::kPad;
  return m;
}

PretrainedLoad load_pretrained(const std::string& path, int dim, const Vocabulary& vocab,
                               double init_scale, Rng& rng, std::string name) {
  if (dim <= 0) throw ConfigError("embedding dimension must be positive");
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open pretrained vector file: " + path);

  std::unordered_map<std::string, std::vector<int>> by_lower;
  for (int id = 2; id < vocab.size(); ++id) by_lower[to_lower_ascii(vocab.token(id))].push_back(id);

  Tensor table = Tensor::Zero(vocab.size(), dim);
  // 0 = unset, 1 = lowercase fallback, 2 = exact match
  std::vector<int> source(static_cast<std::size_t>(vocab.size()), 0);

  std::string line;
  std::size_t line_no = 0;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream fields(line);
    std::string token;
    if (!(fields >> token)) continue;
    values.clear();
    std::string field;
    while (fields >> field) {
      double x = 0;
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), x);
      if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw FormatError(path + ":" + std::to_string(line_no) + ": not a number '" + field + "'");
      }
      values.push_back(x);
    }
    if (static_cast<int>(values.size()) != dim) {
      if (line_no == 1) {
        throw ConfigError("pretrained vectors have dimension " + std::to_string(values.size()) +
                          ", configured " + std::to_string(dim));
      }
      throw FormatError(path + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(dim) + " values, found " + std::to_string(values.size()));
    }
    auto assign = [&](int id, int kind) {
      if (id < 2 || source[static_cast<std::size_t>(id)] >= kind) return;
      for (int c = 0; c < dim; ++c) table(id, c) = values[static_cast<std::size_t>(c)];
      source[static_cast<std::size_t>(id)] = kind;
    };
    if (auto id = vocab.find(token)) assign(*id, 2);
    if (auto it = by_lower.find(token); it != by_lower.end())
      for (int id : it->second) assign(id, 1);
  }

  PretrainedLoad result{EmbeddingMatrix{Parameter(std::move(name), Tensor()), true}, 0};
  std::uniform_real_distribution<double> dist(-init_scale, init_scale);
  for (int id = 1; id < vocab.size(); ++id) {
    if (source[static_cast<std::size_t>(id)] > 0) {
      ++result.covered;
      continue;
    }
    for (int c = 0; c < dim; ++c) table(id, c) = dist(rng);
  }
  result.matrix.table = Parameter(result.matrix.table.name, std::move(table));
  result.matrix.table.row_sparse = true;
  result.matrix.table.frozen_row = Vocabulary::kPad;
  return result;
}

EncodedSentence encode_tokens(const std::vector<std::string>& tokens, const Vocabulary& words,
                              const Vocabulary& chars) {
  EncodedSentence enc;
  enc.word_ids.reserve(tokens.size());
  enc.char_ids.reserve(tokens.size());
  for (const std::string& tok : tokens) {
    enc.word_ids.push_back(words.lookup(tok));
    std::vector<int> ids;
    for (const std::string& ch : utf8_chars(tok)) ids.push_back(chars.find(ch).value_or(Vocabulary::kUnk));
    enc.char_ids.push_back(std::move(ids));
  }
  return enc;
}

EncodedSentence encode(const Sentence& sentence, const Vocabulary& words, const Vocabulary& chars) {
  EncodedSentence enc = encode_tokens(sentence.tokens, words, chars);
  enc.tag_ids.reserve(sentence.tags.size());
  for (Tag t : sentence.tags) enc.tag_ids.push_back(tag_id(t));
  return enc;
}

Tensor lookup(const EmbeddingMatrix& matrix, const std::vector<int>& ids) {
  Tensor out(static_cast<Eigen::Index>(ids.size()), matrix.dim());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= matrix.rows()) {
      throw IndexError("embedding id " + std::to_string(ids[i]) + " out of range for " +
                       std::to_string(matrix.rows()) + " rows");
    }
    out.row(static_cast<Eigen::Index>(i)) = matrix.table.value.row(ids[i]);
  }
  return out;
}

void lookup_backward(EmbeddingMatrix& matrix, const std::vector<int>& ids, const Tensor& dy) {
  if (!matrix.trainable) return;
  if (dy.rows() != static_cast<Eigen::Index>(ids.size()) || dy.cols() != matrix.dim()) {
    throw ShapeError("lookup_backward: gradient " + shape_string(dy.rows(), dy.cols()) +
                     " for " + std::to_string(ids.size()) + " ids of width " +
                     std::to_string(matrix.dim()));
  }
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] == matrix.table.frozen_row) continue;
    matrix.table.grad.row(ids[i]) += dy.row(static_cast<Eigen::Index>(i));
  }
}

}  // namespace dsner
