#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dsner/corpus.hpp"

namespace dsner {

// Span-exact counts and the derived scores. Counts from disjoint shards add
// up to the whole-corpus counts.
struct Metrics {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  double precision = 1.0;
  double recall = 1.0;
  double f1 = 1.0;

  static Metrics from_counts(std::size_t tp, std::size_t fp, std::size_t fn);
  Metrics& operator+=(const Metrics& other);
  friend Metrics operator+(Metrics a, const Metrics& b) { return a += b; }
};

// A predicted span is a true positive iff the same (start, end) appears in
// the gold spans of the same sentence. Micro-averaged.
Metrics span_prf(const std::vector<std::vector<MentionSpan>>& gold,
                 const std::vector<std::vector<MentionSpan>>& pred);

// Convenience: spans extracted from gold and predicted tag sequences.
Metrics span_prf_from_tags(const std::vector<std::vector<Tag>>& gold,
                           const std::vector<std::vector<Tag>>& pred);

double token_accuracy(const std::vector<Tag>& gold, const std::vector<Tag>& pred);
double token_accuracy(const std::vector<std::vector<Tag>>& gold,
                      const std::vector<std::vector<Tag>>& pred);

// "key = value" lines; scores with 3 decimals.
std::string format_report(const Metrics& m);
// One-line JSON record.
std::string format_record(const Metrics& m);

}  // namespace dsner
