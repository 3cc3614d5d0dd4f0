#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace dsner {

// Single entity class: DS (dataset mention). Values double as label ids.
enum class Tag : int { O = 0, B = 1, I = 2 };

inline constexpr int kNumTags = 3;

std::string_view to_string(Tag tag);
Tag tag_from_string(std::string_view s);  // throws ValidationError
inline int tag_id(Tag t) { return static_cast<int>(t); }
Tag tag_from_id(int id);

struct Sentence {
  std::vector<std::string> tokens;
  std::vector<Tag> tags;

  std::size_t size() const { return tokens.size(); }
  bool operator==(const Sentence&) const = default;
};

// Half-open token interval [start, end).
struct MentionSpan {
  std::size_t start = 0;
  std::size_t end = 0;

  auto operator<=>(const MentionSpan&) const = default;
};

struct ParseResult {
  std::vector<Sentence> sentences;
  std::size_t repaired_tags = 0;     // I-DS rewritten to B-DS
  std::size_t skipped_docstart = 0;  // -DOCSTART- lines dropped
  std::size_t warnings() const { return repaired_tags + skipped_docstart; }
};

// token<TAB>tag per line, blank line between sentences.
ParseResult parse_conll(std::string_view text);
ParseResult read_conll_file(const std::string& path);

// Unlabeled input for prediction: the first tab-separated field of each
// line is the token; any tag column is ignored.
std::vector<std::vector<std::string>> parse_token_sentences(std::string_view text);

// Blank line after every sentence; empty corpus writes nothing.
std::string write_conll(const std::vector<Sentence>& sentences);
void write_conll_file(const std::string& path, const std::vector<Sentence>& sentences);

// Rewrites any I-DS not preceded by B-DS/I-DS to B-DS. Returns the number of
// rewrites; a valid sequence is left untouched.
std::size_t repair_iob(std::vector<Tag>& tags);
bool is_iob_valid(const std::vector<Tag>& tags);

std::vector<MentionSpan> tags_to_spans(const std::vector<Tag>& tags);
std::vector<Tag> spans_to_tags(const std::vector<MentionSpan>& spans, std::size_t length);

struct SplitRatios {
  double train = 0.70;
  double validation = 0.15;
  double test = 0.15;
};

struct CorpusSplit {
  std::vector<Sentence> train;
  std::vector<Sentence> validation;
  std::vector<Sentence> test;
  std::uint64_t seed = 0;
};

// Seeded shuffle, then floor(r * N) for validation and test; the remainder
// goes to train.
CorpusSplit split_corpus(const std::vector<Sentence>& sentences, SplitRatios ratios,
                         std::uint64_t seed);

}  // namespace dsner
