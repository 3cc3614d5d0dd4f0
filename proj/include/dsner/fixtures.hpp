#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dsner/corpus.hpp"
#include "dsner/model.hpp"

namespace dsner {

// Synthetic corpus with planted dataset mentions such as
// "the Varomi Lentic Survey ( VLS )" embedded in filler drawn from a fixed
// 50-word vocabulary. Held-out sentences use a name inventory disjoint from
// the train/validation one.
struct FixtureOptions {
  std::uint64_t seed = 7;
  std::size_t train = 200;
  std::size_t validation = 50;
  std::size_t heldout = 50;
  std::size_t names_seen = 120;
  std::size_t names_heldout = 25;
};

struct FixtureCorpus {
  std::vector<Sentence> train;
  std::vector<Sentence> validation;
  std::vector<Sentence> heldout;
  std::vector<std::string> seen_names;
  std::vector<std::string> heldout_names;
};

const std::vector<std::string>& filler_vocabulary();

FixtureCorpus generate_fixtures(const FixtureOptions& options);

// Writes train.conll, validation.conll and heldout.conll into `dir`.
void write_fixtures(const std::string& dir, const FixtureCorpus& corpus);

// Reduced model used for the planted-pattern experiments: 25-d words and
// characters, 16-unit char LSTM, one 32-unit encoder layer, batches of 8.
// Optimizer, L2 and dropout keep the full-size defaults.
ModelConfig fixture_model_config(std::uint64_t seed = 1);

}  // namespace dsner
