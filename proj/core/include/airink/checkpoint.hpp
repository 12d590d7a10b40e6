#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "airink/tensor.hpp"

namespace airink {

/// Single-file model container:
///   8 bytes   magic "AIRINKCK"
///   8 bytes   header length N, little-endian uint64
///   N bytes   JSON header {format, version, metadata, tensors: [{name, shape}]}
///   ...       raw little-endian float64 buffers in header order
struct Checkpoint {
  static constexpr int kFormatVersion = 1;

  ParameterSet parameters;
  std::map<std::string, std::string> metadata;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace airink
