#include "dsner/train.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <numeric>

#include "dsner/log.hpp"
#include "dsner/optim.hpp"

namespace dsner {

Metrics evaluate(const Model& model, const std::vector<Sentence>& gold) {
  const Prediction p = predict(model, gold);
  std::vector<std::vector<MentionSpan>> gold_spans;
  gold_spans.reserve(gold.size());
  for (const Sentence& s : gold) gold_spans.push_back(tags_to_spans(s.tags));
  return span_prf(gold_spans, p.spans);
}

std::vector<std::vector<std::size_t>> make_batches(const std::vector<std::size_t>& lengths,
                                                   int batch_size, Rng& rng) {
  std::vector<std::size_t> order(lengths.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return lengths[a] < lengths[b]; });
  std::vector<std::vector<std::size_t>> batches;
  const auto size = static_cast<std::size_t>(batch_size);
  for (std::size_t i = 0; i < order.size(); i += size) {
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i),
                         order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), i + size)));
  }
  std::shuffle(batches.begin(), batches.end(), rng);
  return batches;
}

namespace {

std::vector<Tensor> snapshot(Model& model) {
  std::vector<Tensor> values;
  for (const Parameter* p : model.parameters()) values.push_back(p->value);
  return values;
}

void restore(Model& model, const std::vector<Tensor>& values) {
  const auto params = model.parameters();
  for (std::size_t k = 0; k < params.size(); ++k) params[k]->value = values[k];
}

}  // namespace

TrainHistory train(Model& model, const std::vector<Sentence>& train_set,
                   const std::vector<Sentence>& validation, const TrainHooks& hooks) {
  if (train_set.empty()) throw ValidationError("training set is empty");
  if (validation.empty()) throw ValidationError("validation set is empty");
  const ModelConfig& cfg = model.config;
  cfg.validate();

  std::vector<EncodedSentence> encoded;
  std::vector<std::size_t> lengths;
  for (const Sentence& s : train_set) {
    encoded.push_back(encode(s, model.words, model.chars));
    lengths.push_back(s.size());
  }

  const std::vector<Parameter*> params = model.parameters();
  AdamState adam;
  Rng rng(cfg.seed + 0x9e3779b97f4a7c15ULL);
  TrainHistory history;
  std::vector<Tensor> best = snapshot(model);
  bool have_best = false;
  int since_best = 0;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    double loss_sum = 0;
    try {
      for (const auto& batch : make_batches(lengths, cfg.batch_size, rng)) {
        zero_grads(params);
        const double scale = 1.0 / static_cast<double>(batch.size());
        for (std::size_t idx : batch) loss_sum += loss_and_gradient(model, encoded[idx], true, rng, scale);
        if (!std::isfinite(loss_sum)) throw NumericError("training loss became non-finite");
        if (cfg.clip_norm > 0) clip_grad_norm(params, cfg.clip_norm);
        adam_step(params, adam, cfg.lr, cfg.l2);
      }
    } catch (const NumericError& e) {
      if (have_best) restore(model, best);
      throw NumericError(std::string(e.what()) + " in epoch " + std::to_string(epoch) +
                         (have_best ? "; restored weights of epoch " + std::to_string(history.best_epoch)
                                    : ""));
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(encoded.size());
    rec.validation = evaluate(model, validation);
    rec.monitored = hooks.monitor ? hooks.monitor(epoch, rec.validation) : rec.validation.f1;
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    history.epochs.push_back(rec);

    const bool improved = !have_best || rec.monitored > history.best_score;
    if (improved) {
      history.best_score = rec.monitored;
      history.best_epoch = epoch;
      best = snapshot(model);
      have_best = true;
      since_best = 0;
    } else {
      ++since_best;
    }
    char line[160];
    std::snprintf(line, sizeof line, "epoch %d loss %.4f val_f1 %.4f (%.1fs)%s", epoch,
                  rec.train_loss, rec.validation.f1, rec.seconds, improved ? " *" : "");
    log_info(line);
    if (hooks.on_epoch_end) hooks.on_epoch_end(model, rec, improved);
    if (since_best >= cfg.patience) {
      history.stopped_early = true;
      break;
    }
  }
  restore(model, best);
  return history;
}

TrainHistory train(Model& model, const CorpusSplit& split, const TrainHooks& hooks) {
  return train(model, split.train, split.validation, hooks);
}

std::string format_history(const TrainHistory& history) {
  std::string out = "epoch\ttrain_loss\tprecision\trecall\tf1\tmonitored\n";
  char line[256];
  for (const EpochRecord& r : history.epochs) {
    std::snprintf(line, sizeof line, "%d\t%.17g\t%.6f\t%.6f\t%.6f\t%.17g\n", r.epoch, r.train_loss,
                  r.validation.precision, r.validation.recall, r.validation.f1, r.monitored);
    out += line;
  }
  std::snprintf(line, sizeof line, "# best_epoch = %d\n# best_score = %.17g\n# stopped_early = %s\n",
                history.best_epoch, history.best_score, history.stopped_early ? "true" : "false");
  out += line;
  return out;
}

}  // namespace dsner
