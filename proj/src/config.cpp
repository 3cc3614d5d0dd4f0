#include "dsner/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dsner/errors.hpp"

namespace dsner {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("invalid value '" + std::string(value) + "' for " + std::string(key));
  }
  return out;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool apply_model_setting(ModelConfig& c, std::string_view key, std::string_view value) {
  if (key == "word_dim") c.word_dim = parse_number<int>(key, value);
  else if (key == "char_dim") c.char_dim = parse_number<int>(key, value);
  else if (key == "char_hidden") c.char_hidden = parse_number<int>(key, value);
  else if (key == "encoder_hidden") c.encoder_hidden = parse_number<int>(key, value);
  else if (key == "encoder_layers") c.encoder_layers = parse_number<int>(key, value);
  else if (key == "dropout") c.dropout = parse_number<double>(key, value);
  else if (key == "lr") c.lr = parse_number<double>(key, value);
  else if (key == "l2") c.l2 = parse_number<double>(key, value);
  else if (key == "batch_size") c.batch_size = parse_number<int>(key, value);
  else if (key == "max_epochs") c.max_epochs = parse_number<int>(key, value);
  else if (key == "patience") c.patience = parse_number<int>(key, value);
  else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "pretrained_path") c.pretrained_path = std::string(value);
  else if (key == "min_count") c.min_count = parse_number<int>(key, value);
  else if (key == "init_scale") c.init_scale = parse_number<double>(key, value);
  else if (key == "clip_norm") c.clip_norm = parse_number<double>(key, value);
  else return false;
  return true;
}

template <typename Apply>
void parse_lines(std::string_view text, Apply&& apply) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    apply(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

}  // namespace

void apply_setting(ModelConfig& config, std::string_view key, std::string_view value) {
  if (!apply_model_setting(config, key, value)) {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

void apply_setting(RunConfig& c, std::string_view key, std::string_view value) {
  if (apply_model_setting(c.model, key, value)) return;
  if (key == "train_path") c.train_path = std::string(value);
  else if (key == "validation_path") c.validation_path = std::string(value);
  else if (key == "test_path") c.test_path = std::string(value);
  else if (key == "checkpoint_path") c.checkpoint_path = std::string(value);
  else if (key == "report_path") c.report_path = std::string(value);
  else throw ConfigError("unknown config key '" + std::string(key) + "'");
}

ModelConfig parse_model_config(std::string_view text) {
  ModelConfig c;
  parse_lines(text, [&](std::string_view k, std::string_view v) { apply_setting(c, k, v); });
  return c;
}

RunConfig parse_run_config(std::string_view text) {
  RunConfig c;
  parse_lines(text, [&](std::string_view k, std::string_view v) { apply_setting(c, k, v); });
  return c;
}

RunConfig read_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

std::string write_model_config(const ModelConfig& c) {
  std::ostringstream out;
  out << "word_dim = " << c.word_dim << '\n'
      << "char_dim = " << c.char_dim << '\n'
      << "char_hidden = " << c.char_hidden << '\n'
      << "encoder_hidden = " << c.encoder_hidden << '\n'
      << "encoder_layers = " << c.encoder_layers << '\n'
      << "dropout = " << format_double(c.dropout) << '\n'
      << "lr = " << format_double(c.lr) << '\n'
      << "l2 = " << format_double(c.l2) << '\n'
      << "batch_size = " << c.batch_size << '\n'
      << "max_epochs = " << c.max_epochs << '\n'
      << "patience = " << c.patience << '\n'
      << "seed = " << c.seed << '\n'
      << "pretrained_path = " << c.pretrained_path << '\n'
      << "min_count = " << c.min_count << '\n'
      << "init_scale = " << format_double(c.init_scale) << '\n'
      << "clip_norm = " << format_double(c.clip_norm) << '\n';
  return out.str();
}

std::string write_run_config(const RunConfig& c) {
  std::string out = write_model_config(c.model);
  out += "train_path = " + c.train_path + '\n';
  out += "validation_path = " + c.validation_path + '\n';
  out += "test_path = " + c.test_path + '\n';
  out += "checkpoint_path = " + c.checkpoint_path + '\n';
  out += "report_path = " + c.report_path + '\n';
  return out;
}

}  // namespace dsner
