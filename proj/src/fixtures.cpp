#include "dsner/fixtures.hpp"

#include <filesystem>
#include <random>
#include <set>

#include "dsner/errors.hpp"
#include "dsner/tensor.hpp"

namespace dsner {

const std::vector<std::string>& filler_vocabulary() {
  static const std::vector<std::string> words = {
      "the",      "of",        "and",       "in",       "we",          "use",      "used",
      "data",     "from",      "to",        "a",        "on",          "for",      "with",
      "was",      "were",      "is",        "are",      "this",        "that",     "study",
      "analysis", "sample",    "results",   "model",    "effect",      "income",   "health",
      "school",   "children",  "women",     "families", "respondents", "wave",     "years",
      "survey",   "estimates", "measures",  "rates",    "employment",  "education", "by",
      "at",       "our",       "these",     "among",    "between",     "report",   "based",
      ".",
  };
  return words;
}

namespace {

const std::vector<std::string> kSuffixes = {"Survey", "Study", "Panel", "Census"};

std::string capitalized_word(Rng& rng) {
  static const std::vector<std::string> onsets = {"b", "d", "f", "g", "k", "l", "m", "n",
                                                   "p", "r", "s", "t", "v", "z", "br", "tr"};
  static const std::vector<std::string> vowels = {"a", "e", "i", "o", "u"};
  std::uniform_int_distribution<int> syllables(2, 3);
  std::string w;
  const int n = syllables(rng);
  for (int i = 0; i < n; ++i) {
    w += onsets[std::uniform_int_distribution<std::size_t>(0, onsets.size() - 1)(rng)];
    w += vowels[std::uniform_int_distribution<std::size_t>(0, vowels.size() - 1)(rng)];
  }
  if (std::bernoulli_distribution(0.5)(rng)) w += "n";
  w[0] = static_cast<char>(w[0] - 'a' + 'A');
  return w;
}

std::vector<std::string> make_inventory(std::size_t count, std::set<std::string>& taken, Rng& rng) {
  std::vector<std::string> out;
  while (out.size() < count) {
    std::string w = capitalized_word(rng);
    if (taken.insert(w).second) out.push_back(std::move(w));
  }
  return out;
}

class SentenceBuilder {
 public:
  void word(const std::string& w) { add(w, Tag::O); }
  void filler(Rng& rng, int lo, int hi) {
    const auto& f = filler_vocabulary();
    const int n = std::uniform_int_distribution<int>(lo, hi)(rng);
    for (int i = 0; i < n; ++i) word(f[std::uniform_int_distribution<std::size_t>(0, f.size() - 1)(rng)]);
  }
  void mention(const std::vector<std::string>& tokens) {
    for (std::size_t i = 0; i < tokens.size(); ++i) add(tokens[i], i == 0 ? Tag::B : Tag::I);
  }
  Sentence take() { return std::move(s_); }

 private:
  void add(const std::string& w, Tag t) {
    s_.tokens.push_back(w);
    s_.tags.push_back(t);
  }
  Sentence s_;
};

struct DatasetName {
  std::vector<std::string> tokens;
  std::string abbreviation;
};

DatasetName draw_name(const std::vector<std::string>& inventory, Rng& rng) {
  DatasetName d;
  const int parts = std::uniform_int_distribution<int>(1, 2)(rng);
  for (int i = 0; i < parts; ++i)
    d.tokens.push_back(inventory[std::uniform_int_distribution<std::size_t>(0, inventory.size() - 1)(rng)]);
  d.tokens.push_back(kSuffixes[std::uniform_int_distribution<std::size_t>(0, kSuffixes.size() - 1)(rng)]);
  for (const std::string& t : d.tokens) d.abbreviation += t[0];
  return d;
}

Sentence make_sentence(const std::vector<std::string>& inventory, Rng& rng) {
  SentenceBuilder b;
  const DatasetName name = draw_name(inventory, rng);
  switch (std::uniform_int_distribution<int>(0, 4)(rng)) {
    case 0:  // we use data from the X Survey ( XS ) ...
      b.filler(rng, 0, 3);
      b.word("data");
      b.word("from");
      b.word("the");
      b.mention(name.tokens);
      b.word("(");
      b.mention({name.abbreviation});
      b.word(")");
      b.filler(rng, 1, 5);
      break;
    case 1:  // ... the X Survey ...
      b.filler(rng, 1, 4);
      b.word("the");
      b.mention(name.tokens);
      b.filler(rng, 1, 5);
      break;
    case 2: {  // ... the X Survey and the Y Study ...
      const DatasetName other = draw_name(inventory, rng);
      b.filler(rng, 0, 3);
      b.word("the");
      b.mention(name.tokens);
      b.word("and");
      b.word("the");
      b.mention(other.tokens);
      b.filler(rng, 1, 4);
      break;
    }
    case 3:  // ... ( XS ) respondents ...
      b.filler(rng, 1, 4);
      b.word("in");
      b.word("the");
      b.mention(name.tokens);
      b.word("(");
      b.mention({name.abbreviation});
      b.word(")");
      b.word("respondents");
      b.filler(rng, 0, 3);
      break;
    default:  // no mention
      b.filler(rng, 4, 10);
      break;
  }
  b.word(".");
  return b.take();
}

}  // namespace

FixtureCorpus generate_fixtures(const FixtureOptions& options) {
  if (options.names_seen == 0 || options.names_heldout == 0) {
    throw ValidationError("fixture name inventories must be non-empty");
  }
  Rng rng(options.seed);
  std::set<std::string> taken;
  FixtureCorpus c;
  c.seen_names = make_inventory(options.names_seen, taken, rng);
  c.heldout_names = make_inventory(options.names_heldout, taken, rng);
  for (std::size_t i = 0; i < options.train; ++i) c.train.push_back(make_sentence(c.seen_names, rng));
  for (std::size_t i = 0; i < options.validation; ++i)
    c.validation.push_back(make_sentence(c.seen_names, rng));
  for (std::size_t i = 0; i < options.heldout; ++i)
    c.heldout.push_back(make_sentence(c.heldout_names, rng));
  return c;
}

void write_fixtures(const std::string& dir, const FixtureCorpus& corpus) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  write_conll_file((base / "train.conll").string(), corpus.train);
  write_conll_file((base / "validation.conll").string(), corpus.validation);
  write_conll_file((base / "heldout.conll").string(), corpus.heldout);
}

ModelConfig fixture_model_config(std::uint64_t seed) {
  ModelConfig c;
  c.word_dim = 25;
  c.char_dim = 25;
  c.char_hidden = 16;
  c.encoder_hidden = 32;
  c.encoder_layers = 1;
  c.dropout = 0.5;
  c.lr = 0.001;
  c.l2 = 0.01;
  // 200 sentences at batch 64 would give ~4 updates per epoch.
  c.batch_size = 8;
  c.max_epochs = 50;
  c.patience = 10;
  c.seed = seed;
  return c;
}

}  // namespace dsner
