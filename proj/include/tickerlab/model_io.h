#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "tickerlab/models.h"

namespace tickerlab::models {

// Model container layout (all integers little-endian):
//
//   "TKLB"                      4-byte magic
//   u32 version                 kModelFormatVersion
//   u64 length, bytes, u64 fnv  JSON metadata: spec, scaler, fingerprint,
//                               train config, loss history
//   u32 section count
//   per section:
//     u32 name length, name     e.g. "lstm0.input_weights"
//     u32 rank, u64 dims[rank]
//     u64 count, f64 values[count]
//     u64 fnv                   over name, dims and value bytes
inline constexpr std::uint32_t kModelFormatVersion = 1;

std::string serialize_model(const TrainedModel& model);
TrainedModel deserialize_model(const std::string& bytes);

void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace tickerlab::models
