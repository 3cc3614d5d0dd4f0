#include "dsner/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <json.hpp>

#include "dsner/errors.hpp"

namespace dsner {

Metrics Metrics::from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  Metrics m;
  m.true_positives = tp;
  m.false_positives = fp;
  m.false_negatives = fn;
  // With nothing on one side the ratio is vacuously 1 only when the other
  // side is empty too.
  m.precision = (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp)
                              : (tp + fn == 0 ? 1.0 : 0.0);
  m.recall = (tp + fn) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn)
                           : (tp + fp == 0 ? 1.0 : 0.0);
  const double sum = m.precision + m.recall;
  m.f1 = sum > 0 ? 2.0 * m.precision * m.recall / sum : 0.0;
  return m;
}

Metrics& Metrics::operator+=(const Metrics& other) {
  *this = from_counts(true_positives + other.true_positives,
                      false_positives + other.false_positives,
                      false_negatives + other.false_negatives);
  return *this;
}

Metrics span_prf(const std::vector<std::vector<MentionSpan>>& gold,
                 const std::vector<std::vector<MentionSpan>>& pred) {
  if (gold.size() != pred.size()) {
    throw ValidationError("gold has " + std::to_string(gold.size()) + " sentences, predictions " +
                          std::to_string(pred.size()));
  }
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    std::vector<MentionSpan> g = gold[s];
    std::sort(g.begin(), g.end());
    std::size_t hits = 0;
    for (const MentionSpan& p : pred[s])
      if (std::binary_search(g.begin(), g.end(), p)) ++hits;
    tp += hits;
    fp += pred[s].size() - hits;
    fn += g.size() - hits;
  }
  return Metrics::from_counts(tp, fp, fn);
}

Metrics span_prf_from_tags(const std::vector<std::vector<Tag>>& gold,
                           const std::vector<std::vector<Tag>>& pred) {
  std::vector<std::vector<MentionSpan>> g, p;
  for (const auto& t : gold) g.push_back(tags_to_spans(t));
  for (const auto& t : pred) p.push_back(tags_to_spans(t));
  return span_prf(g, p);
}

double token_accuracy(const std::vector<Tag>& gold, const std::vector<Tag>& pred) {
  return token_accuracy(std::vector<std::vector<Tag>>{gold}, std::vector<std::vector<Tag>>{pred});
}

double token_accuracy(const std::vector<std::vector<Tag>>& gold,
                      const std::vector<std::vector<Tag>>& pred) {
  if (gold.size() != pred.size()) throw ValidationError("token_accuracy: sentence count mismatch");
  std::size_t total = 0, equal = 0;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    if (gold[s].size() != pred[s].size()) {
      throw ValidationError("token_accuracy: length mismatch in sentence " + std::to_string(s));
    }
    total += gold[s].size();
    for (std::size_t i = 0; i < gold[s].size(); ++i) equal += gold[s][i] == pred[s][i];
  }
  return total == 0 ? 1.0 : static_cast<double>(equal) / static_cast<double>(total);
}

std::string format_report(const Metrics& m) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "precision = %.3f\nrecall = %.3f\nf1 = %.3f\ntrue_positives = %zu\n"
                "false_positives = %zu\nfalse_negatives = %zu\n",
                m.precision, m.recall, m.f1, m.true_positives, m.false_positives,
                m.false_negatives);
  return buf;
}

std::string format_record(const Metrics& m) {
  nlohmann::ordered_json j;
  j["matching"] = "span-exact";
  j["precision"] = m.precision;
  j["recall"] = m.recall;
  j["f1"] = m.f1;
  j["tp"] = m.true_positives;
  j["fp"] = m.false_positives;
  j["fn"] = m.false_negatives;
  return j.dump();
}

}  // namespace dsner
