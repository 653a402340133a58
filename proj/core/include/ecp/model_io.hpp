#pragma once

#include <filesystem>

#include "ecp/mlp.hpp"

namespace ecp {

// Model file, little-endian throughout:
//
//   "ECPM"              4-byte magic
//   u32 version         1
//   u32 id_len, bytes   arch_id
//   u32 n_dims, u32[]   layer widths, input first
//   u8[n_dims-1]        activation per layer (0 relu, 1 softmax)
//   u64 train_seed
//   per layer: float32 weights row-major (out x in), then float32 biases
void save_model(const MlpModel& model, const std::filesystem::path& path);
MlpModel load_model(const std::filesystem::path& path);

}  // namespace ecp
