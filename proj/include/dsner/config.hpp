#pragma once

#include <string>
#include <string_view>

#include "dsner/model.hpp"

namespace dsner {

// Model settings plus the file paths a training run needs.
struct RunConfig {
  ModelConfig model;
  std::string train_path;
  std::string validation_path;  // empty: split train 70/15/15 by seed
  std::string test_path;
  std::string checkpoint_path = "model.ckpt";
  std::string report_path;      // empty: <checkpoint_path>.history.tsv

  bool operator==(const RunConfig&) const = default;
};

// Flat `key = value` text; '#' starts a comment line. Unknown keys and
// malformed values raise ConfigError.
RunConfig parse_run_config(std::string_view text);
RunConfig read_run_config(const std::string& path);
std::string write_run_config(const RunConfig& config);

// The model keys only (embedded in checkpoints).
ModelConfig parse_model_config(std::string_view text);
std::string write_model_config(const ModelConfig& config);

void apply_setting(RunConfig& config, std::string_view key, std::string_view value);
void apply_setting(ModelConfig& config, std::string_view key, std::string_view value);

}  // namespace dsner
