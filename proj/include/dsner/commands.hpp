#pragma once

#include <cstdint>
#include <exception>
#include <ostream>
#include <string>

#include "dsner/config.hpp"

namespace dsner {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitNumeric = 3 };

// Config errors -> 1, data/format/load errors -> 2, numeric failures -> 3.
int exit_code_for(const std::exception& e);

// Each command reports to `out`, diagnostics to `err`, and returns an exit
// code instead of throwing.
int cmd_train(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_eval(const std::string& checkpoint, const std::string& corpus, std::ostream& out,
             std::ostream& err);
// Scores an already-tagged file against gold without a model.
int cmd_eval_files(const std::string& gold, const std::string& predicted, std::ostream& out,
                   std::ostream& err);
// Writes CoNLL with predicted tags to `output` and a span table to
// `output`.spans.tsv.
int cmd_predict(const std::string& checkpoint, const std::string& input, const std::string& output,
                std::ostream& out, std::ostream& err);
int cmd_gradcheck(bool corrupt, std::ostream& out, std::ostream& err);
int cmd_fixtures_generate(const std::string& dir, std::uint64_t seed, std::ostream& out,
                          std::ostream& err);

// Largest relative error accepted by the gradcheck command.
inline constexpr double kGradcheckTolerance = 1e-4;

}  // namespace dsner
