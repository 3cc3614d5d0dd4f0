#include "dsner/checkpoint.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dsner/config.hpp"
#include "dsner/errors.hpp"

namespace dsner {

namespace {

constexpr char kMagic[8] = {'D', 'S', 'N', 'E', 'R', 'C', 'K', 'P'};

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Writer {
 public:
  template <typename T>
  void pod(T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out_.append(buf, sizeof(T));
  }
  void str(std::string_view s) {
    pod<std::uint64_t>(s.size());
    out_.append(s);
  }
  std::string& bytes() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}
  template <typename T>
  T pod() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, in_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string str() {
    const auto n = pod<std::uint64_t>();
    need(n);
    std::string s(in_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  void need(std::uint64_t n) const {
    if (n > in_.size() - pos_) throw LoadError("checkpoint is truncated");
  }
  std::string_view in_;
  std::size_t pos_ = 0;
};

void write_vocab(Writer& w, const Vocabulary& v) {
  w.pod<std::uint64_t>(v.tokens().size());
  for (const std::string& t : v.tokens()) w.str(t);
}

Vocabulary read_vocab(Reader& r) {
  const auto n = r.pod<std::uint64_t>();
  std::vector<std::string> tokens;
  for (std::uint64_t i = 0; i < n; ++i) tokens.push_back(r.str());
  try {
    return Vocabulary::from_tokens(tokens);
  } catch (const ValidationError& e) {
    throw LoadError(std::string("bad vocabulary in checkpoint: ") + e.what());
  }
}

}  // namespace

std::string serialize_model(const Model& model) {
  Writer payload;
  payload.str(write_model_config(model.config));
  write_vocab(payload, model.words);
  write_vocab(payload, model.chars);
  const auto params = model.parameters();
  payload.pod<std::uint64_t>(params.size());
  for (const Parameter* p : params) {
    payload.str(p->name);
    payload.pod<std::uint64_t>(static_cast<std::uint64_t>(p->value.rows()));
    payload.pod<std::uint64_t>(static_cast<std::uint64_t>(p->value.cols()));
    for (Eigen::Index r = 0; r < p->value.rows(); ++r)
      for (Eigen::Index c = 0; c < p->value.cols(); ++c) payload.pod<double>(p->value(r, c));
  }

  Writer file;
  file.bytes().append(kMagic, sizeof kMagic);
  file.pod<std::uint32_t>(kCheckpointVersion);
  file.pod<std::uint64_t>(payload.bytes().size());
  file.bytes() += payload.bytes();
  file.pod<std::uint64_t>(fnv1a(payload.bytes()));
  return std::move(file.bytes());
}

Model deserialize_model(const std::string& bytes) {
  if (bytes.size() < sizeof kMagic || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw LoadError("not a checkpoint file (bad magic)");
  }
  Reader header(std::string_view(bytes).substr(sizeof kMagic));
  const auto version = header.pod<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw LoadError("unsupported checkpoint version " + std::to_string(version) + " (expected " +
                    std::to_string(kCheckpointVersion) + ")");
  }
  const auto size = header.pod<std::uint64_t>();
  const std::size_t offset = sizeof kMagic + sizeof(std::uint32_t) + sizeof(std::uint64_t);
  if (bytes.size() < offset || size > bytes.size() - offset ||
      bytes.size() - offset - size != sizeof(std::uint64_t)) {
    throw LoadError("checkpoint is truncated or has trailing data");
  }
  const std::string_view payload = std::string_view(bytes).substr(offset, size);
  std::uint64_t stored = 0;
  std::memcpy(&stored, bytes.data() + offset + size, sizeof stored);
  if (stored != fnv1a(payload)) throw LoadError("checkpoint checksum mismatch");

  Reader r(payload);
  ModelConfig config;
  try {
    config = parse_model_config(r.str());
  } catch (const ConfigError& e) {
    throw LoadError(std::string("bad config in checkpoint: ") + e.what());
  }
  Vocabulary words = read_vocab(r);
  Vocabulary chars = read_vocab(r);
  Model model;
  try {
    model = Model::allocate(config, std::move(words), std::move(chars));
  } catch (const ConfigError& e) {
    throw LoadError(std::string("bad config in checkpoint: ") + e.what());
  }

  const auto params = model.parameters();
  if (r.pod<std::uint64_t>() != params.size()) throw LoadError("checkpoint parameter count mismatch");
  for (Parameter* p : params) {
    const std::string name = r.str();
    const auto rows = r.pod<std::uint64_t>();
    const auto cols = r.pod<std::uint64_t>();
    if (name != p->name || rows != static_cast<std::uint64_t>(p->value.rows()) ||
        cols != static_cast<std::uint64_t>(p->value.cols())) {
      throw LoadError("checkpoint parameter '" + name + "' does not match the model layout");
    }
    for (Eigen::Index i = 0; i < p->value.rows(); ++i)
      for (Eigen::Index j = 0; j < p->value.cols(); ++j) p->value(i, j) = r.pod<double>();
  }
  if (!r.done()) throw LoadError("checkpoint has unread data");
  return model;
}

void save_checkpoint(const Model& model, const std::string& path) {
  const std::string bytes = serialize_model(model);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write checkpoint: " + tmp);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw Error("failed writing checkpoint: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

Model load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open checkpoint: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_model(buf.str());
}

}  // namespace dsner
