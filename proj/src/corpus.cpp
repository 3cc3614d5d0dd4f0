#include "dsner/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "dsner/errors.hpp"

namespace dsner {

std::string_view to_string(Tag tag) {
  switch (tag) {
    case Tag::O: return "O";
    case Tag::B: return "B-DS";
    case Tag::I: return "I-DS";
  }
  return "O";
}

Tag tag_from_string(std::string_view s) {
  if (s == "O") return Tag::O;
  if (s == "B-DS") return Tag::B;
  if (s == "I-DS") return Tag::I;
  throw ValidationError("unknown tag '" + std::string(s) + "'");
}

Tag tag_from_id(int id) {
  if (id < 0 || id >= kNumTags) throw IndexError("tag id out of range: " + std::to_string(id));
  return static_cast<Tag>(id);
}

std::size_t repair_iob(std::vector<Tag>& tags) {
  std::size_t fixed = 0;
  Tag prev = Tag::O;
  for (Tag& t : tags) {
    if (t == Tag::I && prev == Tag::O) {
      t = Tag::B;
      ++fixed;
    }
    prev = t;
  }
  return fixed;
}

bool is_iob_valid(const std::vector<Tag>& tags) {
  Tag prev = Tag::O;
  for (Tag t : tags) {
    if (t == Tag::I && prev == Tag::O) return false;
    prev = t;
  }
  return true;
}

ParseResult parse_conll(std::string_view text) {
  ParseResult result;
  Sentence current;
  std::size_t line_no = 0;

  auto flush = [&] {
    if (current.tokens.empty()) return;
    result.repaired_tags += repair_iob(current.tags);
    result.sentences.push_back(std::move(current));
    current = Sentence{};
  };

  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (line.empty()) {
      flush();
      continue;
    }
    if (line.starts_with("-DOCSTART-")) {
      ++result.skipped_docstart;
      continue;
    }
    std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos || line.find('\t', tab + 1) != std::string_view::npos) {
      throw ParseError(line_no, "expected exactly two tab-separated fields");
    }
    std::string_view token = line.substr(0, tab);
    std::string_view tag = line.substr(tab + 1);
    if (token.empty()) throw ParseError(line_no, "empty token");
    try {
      current.tags.push_back(tag_from_string(tag));
    } catch (const ValidationError&) {
      throw ParseError(line_no, "unknown tag '" + std::string(tag) + "'");
    }
    current.tokens.emplace_back(token);
  }
  flush();
  return result;
}

ParseResult read_conll_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open corpus file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_conll(buf.str());
}

std::vector<std::vector<std::string>> parse_token_sentences(std::string_view text) {
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> current;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
      continue;
    }
    if (line.starts_with("-DOCSTART-")) continue;
    current.emplace_back(line.substr(0, line.find('\t')));
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

std::string write_conll(const std::vector<Sentence>& sentences) {
  std::string out;
  for (const Sentence& s : sentences) {
    if (s.tokens.size() != s.tags.size() || s.tokens.empty()) {
      throw ValidationError("sentence must have equal, nonzero token and tag counts");
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
      out += s.tokens[i];
      out += '\t';
      out += to_string(s.tags[i]);
      out += '\n';
    }
    out += '\n';
  }
  return out;
}

void write_conll_file(const std::string& path, const std::vector<Sentence>& sentences) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write corpus file: " + path);
  out << write_conll(sentences);
}

std::vector<MentionSpan> tags_to_spans(const std::vector<Tag>& tags) {
  std::vector<MentionSpan> spans;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (tags[i] == Tag::O) continue;
    // A stray I-DS opens a span as well, matching the repair rule.
    std::size_t end = i + 1;
    while (end < tags.size() && tags[end] == Tag::I) ++end;
    spans.push_back({i, end});
    i = end - 1;
  }
  return spans;
}

std::vector<Tag> spans_to_tags(const std::vector<MentionSpan>& spans, std::size_t length) {
  std::vector<Tag> tags(length, Tag::O);
  std::vector<MentionSpan> sorted = spans;
  std::sort(sorted.begin(), sorted.end());
  std::size_t last_end = 0;
  for (const MentionSpan& s : sorted) {
    if (s.start >= s.end || s.end > length) {
      throw ValidationError("span [" + std::to_string(s.start) + "," + std::to_string(s.end) +
                            ") out of range for length " + std::to_string(length));
    }
    if (s.start < last_end) throw ValidationError("overlapping spans");
    tags[s.start] = Tag::B;
    for (std::size_t i = s.start + 1; i < s.end; ++i) tags[i] = Tag::I;
    last_end = s.end;
  }
  return tags;
}

CorpusSplit split_corpus(const std::vector<Sentence>& sentences, SplitRatios ratios,
                         std::uint64_t seed) {
  if (sentences.empty()) throw ValidationError("cannot split an empty corpus");
  const double sum = ratios.train + ratios.validation + ratios.test;
  if (ratios.train < 0 || ratios.validation < 0 || ratios.test < 0 ||
      std::abs(sum - 1.0) > 1e-9) {
    throw ValidationError("split ratios must be non-negative and sum to 1");
  }
  const std::size_t n = sentences.size();
  // The epsilon absorbs representation error such as 0.15 * 100 = 14.999...
  auto part = [n](double r) {
    return static_cast<std::size_t>(std::floor(r * static_cast<double>(n) + 1e-9));
  };
  const std::size_t n_val = part(ratios.validation);
  const std::size_t n_test = part(ratios.test);
  const std::size_t n_train = n - n_val - n_test;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  CorpusSplit split;
  split.seed = seed;
  for (std::size_t k = 0; k < n; ++k) {
    const Sentence& s = sentences[order[k]];
    if (k < n_train) split.train.push_back(s);
    else if (k < n_train + n_val) split.validation.push_back(s);
    else split.test.push_back(s);
  }
  return split;
}

}  // namespace dsner
