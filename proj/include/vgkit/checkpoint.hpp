#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "vgkit/model.hpp"
#include "vgkit/vocab.hpp"

namespace vgkit {

// Everything needed to run a trained model on a dataset. See
// docs/formats.md for the byte layout.
struct Checkpoint {
  GroundingModel model;
  Vocabulary vocab;
  bool regression = true;  // whether predictions apply the box offsets
  std::uint64_t iteration = 0;
  std::string variant;  // ranking loss used for training
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Serialized bytes, identical to the file contents.
std::string serialize_checkpoint(const Checkpoint& checkpoint);
Checkpoint deserialize_checkpoint(const std::string& bytes);

}  // namespace vgkit
