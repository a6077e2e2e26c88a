#pragma once
#include <cstdint>
#include <string>

#include "hran/config.hpp"
#include "hran/layers.hpp"

namespace hran {

// Optimizer state persisted alongside the parameters so training resumes
// bit-exactly: Adam step counter, next training iteration, moment buffers.
struct OptimSnapshot {
  int64_t adam_t = 0;
  int64_t iteration = 0;
  ParamTable<float> m, v;
};

// Binary checkpoint, magic "HRN1". Layout (all little-endian):
//   magic[4] | u32 version | u64 config_len | config text (key = value lines)
//   u32 tensor_count | per tensor: u16 name_len, name, u8 dtype, u32 dims[4], raw scalars
//   u8 has_optim | [u64 adam_t, u64 iteration, per tensor: m raw, v raw]
//   u32 crc32 over everything before it
// Save -> load -> save produces byte-identical files.
void save_checkpoint(const std::string& path, const std::string& config_text,
                     const ParamTable<float>& params, const OptimSnapshot* optim = nullptr);

struct LoadedCheckpoint {
  std::string config_text;
  RunConfig config;
  ParamTable<float> params;
  bool has_optim = false;
  OptimSnapshot optim;
};

LoadedCheckpoint load_checkpoint(const std::string& path);

uint32_t crc32(const uint8_t* data, size_t len);

}  // namespace hran
