#include "dsner/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dsner/checkpoint.hpp"
#include "dsner/corpus.hpp"
#include "dsner/fixtures.hpp"
#include "dsner/gradcheck.hpp"
#include "dsner/log.hpp"
#include "dsner/metrics.hpp"
#include "dsner/train.hpp"

namespace dsner {

namespace fs = std::filesystem;

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const NumericError*>(&e)) return kExitNumeric;
  if (dynamic_cast<const ConfigError*>(&e)) return kExitUsage;
  return kExitData;
}

namespace {

template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw ConfigError(std::string(what) + " path is not set");
  if (!fs::is_regular_file(path)) throw ConfigError(std::string(what) + " not found: " + path);
}

std::vector<Sentence> read_corpus(const std::string& path) {
  ParseResult r = read_conll_file(path);
  if (r.repaired_tags > 0) {
    log_warn(path + ": repaired " + std::to_string(r.repaired_tags) + " I-DS tag(s) to B-DS");
  }
  if (r.skipped_docstart > 0) {
    log_warn(path + ": skipped " + std::to_string(r.skipped_docstart) + " -DOCSTART- line(s)");
  }
  return std::move(r.sentences);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

void print_metrics(std::ostream& out, const Metrics& m) {
  out << format_report(m) << format_record(m) << '\n';
}

}  // namespace

int cmd_train(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    config.model.validate();
    require_file(config.train_path, "training corpus");
    if (!config.validation_path.empty()) require_file(config.validation_path, "validation corpus");
    if (!config.test_path.empty()) require_file(config.test_path, "test corpus");
    if (!config.model.pretrained_path.empty()) require_file(config.model.pretrained_path, "pretrained vectors");
    if (config.checkpoint_path.empty()) throw ConfigError("checkpoint_path is not set");

    CorpusSplit split;
    std::vector<Sentence> all = read_corpus(config.train_path);
    if (config.validation_path.empty()) {
      split = split_corpus(all, SplitRatios{}, config.model.seed);
    } else {
      split.train = std::move(all);
      split.validation = read_corpus(config.validation_path);
    }
    if (!config.test_path.empty()) split.test = read_corpus(config.test_path);
    if (split.train.empty() || split.validation.empty()) {
      throw ValidationError("training and validation sets must be non-empty");
    }

    Model model = Model::create(config.model, build_word_vocab(split.train, config.model.min_count),
                                build_char_vocab(split.train));
    TrainHooks hooks;
    // Keeps the best weights on disk so a numeric failure leaves a usable checkpoint.
    hooks.on_epoch_end = [&](const Model& m, const EpochRecord&, bool improved) {
      if (improved) save_checkpoint(m, config.checkpoint_path);
    };
    const TrainHistory history = train(model, split, hooks);
    save_checkpoint(model, config.checkpoint_path);

    std::string report = format_history(history);
    if (!split.test.empty()) {
      const Metrics test = evaluate(model, split.test);
      report += "# test " + format_record(test) + '\n';
      out << "test set (" << split.test.size() << " sentences)\n";
      print_metrics(out, test);
    }
    const std::string report_path =
        config.report_path.empty() ? config.checkpoint_path + ".history.tsv" : config.report_path;
    write_text(report_path, report);
    out << "best epoch " << history.best_epoch << " of " << history.epochs.size()
        << ", checkpoint " << config.checkpoint_path << ", report " << report_path << '\n';
    return kExitOk;
  });
}

int cmd_eval(const std::string& checkpoint, const std::string& corpus, std::ostream& out,
             std::ostream& err) {
  return guarded(err, [&] {
    const Model model = load_checkpoint(checkpoint);
    print_metrics(out, evaluate(model, read_corpus(corpus)));
    return kExitOk;
  });
}

int cmd_eval_files(const std::string& gold, const std::string& predicted, std::ostream& out,
                   std::ostream& err) {
  return guarded(err, [&] {
    const std::vector<Sentence> g = read_corpus(gold);
    const std::vector<Sentence> p = read_corpus(predicted);
    std::vector<std::vector<Tag>> gt, pt;
    for (const Sentence& s : g) gt.push_back(s.tags);
    for (const Sentence& s : p) pt.push_back(s.tags);
    print_metrics(out, span_prf_from_tags(gt, pt));
    return kExitOk;
  });
}

int cmd_predict(const std::string& checkpoint, const std::string& input, const std::string& output,
                std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Model model = load_checkpoint(checkpoint);
    const auto sentences = parse_token_sentences(read_text(input));
    const Prediction pred = predict(model, sentences);

    std::vector<Sentence> tagged;
    std::string spans = "sentence\tstart\tend\ttext\n";
    for (std::size_t i = 0; i < sentences.size(); ++i) {
      tagged.push_back({sentences[i], spans_to_tags(pred.spans[i], sentences[i].size())});
      for (const MentionSpan& s : pred.spans[i]) {
        std::string text;
        for (std::size_t t = s.start; t < s.end; ++t) text += (t > s.start ? " " : "") + sentences[i][t];
        spans += std::to_string(i) + '\t' + std::to_string(s.start) + '\t' + std::to_string(s.end) +
                 '\t' + text + '\n';
      }
    }
    write_text(output, write_conll(tagged));
    write_text(output + ".spans.tsv", spans);
    std::size_t mentions = 0;
    for (const auto& s : pred.spans) mentions += s.size();
    out << "tagged " << sentences.size() << " sentence(s), " << mentions << " mention(s)\n";
    return kExitOk;
  });
}

int cmd_gradcheck(bool corrupt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    ModelGradCheckOptions opts;
    opts.corrupt = corrupt;
    const GradCheckReport report = model_gradient_check(opts);
    char line[160];
    for (const GradCheckEntry& e : report.entries) {
      std::snprintf(line, sizeof line, "%-24s max_rel_error %.3e\n", e.name.c_str(), e.max_rel_error);
      out << line;
    }
    std::snprintf(line, sizeof line, "overall max_rel_error %.3e (tolerance %.0e)\n",
                  report.max_rel_error, kGradcheckTolerance);
    out << line;
    if (report.max_rel_error >= kGradcheckTolerance) {
      err << "error: gradient check failed\n";
      return static_cast<int>(kExitNumeric);
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_fixtures_generate(const std::string& dir, std::uint64_t seed, std::ostream& out,
                          std::ostream& err) {
  return guarded(err, [&] {
    FixtureOptions opts;
    opts.seed = seed;
    write_fixtures(dir, generate_fixtures(opts));
    RunConfig cfg;
    cfg.model = fixture_model_config(seed);
    const fs::path base(dir);
    cfg.train_path = (base / "train.conll").string();
    cfg.validation_path = (base / "validation.conll").string();
    cfg.test_path = (base / "heldout.conll").string();
    cfg.checkpoint_path = (base / "fixture.ckpt").string();
    write_text((base / "fixture.cfg").string(), write_run_config(cfg));
    out << "wrote train.conll, validation.conll, heldout.conll and fixture.cfg to " << dir << '\n';
    return kExitOk;
  });
}

}  // namespace dsner
