#pragma once

#include <cstdint>
#include <string>

#include "dsner/model.hpp"

namespace dsner {

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Layout is documented in docs/checkpoint_format.md. The file is written to
// a temporary sibling and renamed into place.
void save_checkpoint(const Model& model, const std::string& path);

// Throws LoadError on a bad magic, version, checksum, truncation or any
// parameter shape that disagrees with the embedded config.
Model load_checkpoint(const std::string& path);

std::string serialize_model(const Model& model);
Model deserialize_model(const std::string& bytes);

}  // namespace dsner
