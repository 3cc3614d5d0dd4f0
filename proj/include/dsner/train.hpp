#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dsner/metrics.hpp"
#include "dsner/model.hpp"

namespace dsner {

struct EpochRecord {
  int epoch = 0;            // 1-based
  double train_loss = 0;    // mean NLL per training sentence
  Metrics validation;
  double monitored = 0;     // value used for early stopping
  double seconds = 0;       // wall time, not part of formatted reports
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  double best_score = 0;
  bool stopped_early = false;
};

struct TrainHooks {
  // Replaces the monitored metric (validation F1 by default).
  std::function<double(int epoch, const Metrics& validation)> monitor;
  // Called after each epoch's evaluation with the current weights.
  std::function<void(const Model& model, const EpochRecord& record, bool improved)> on_epoch_end;
};

Metrics evaluate(const Model& model, const std::vector<Sentence>& gold);

// Sentences sorted into length buckets, order inside a bucket shuffled, then
// chunked into batches whose order is shuffled as well.
std::vector<std::vector<std::size_t>> make_batches(const std::vector<std::size_t>& lengths,
                                                   int batch_size, Rng& rng);

// Minibatch Adam on the mean CRF NLL with L2 and dropout. Stops after
// `patience` epochs without a strict improvement of the monitored metric, or
// at max_epochs, and restores the best weights. A non-finite loss restores
// the best weights seen so far and throws NumericError.
TrainHistory train(Model& model, const std::vector<Sentence>& train_set,
                   const std::vector<Sentence>& validation, const TrainHooks& hooks = {});
TrainHistory train(Model& model, const CorpusSplit& split, const TrainHooks& hooks = {});

// Tab-separated per-epoch table plus a best-epoch footer. Deterministic for a
// fixed seed (wall times are left out).
std::string format_history(const TrainHistory& history);

}  // namespace dsner
