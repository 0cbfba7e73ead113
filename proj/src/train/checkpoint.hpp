#pragma once

// Checkpoint file format (bit-exact):
//   bytes 0..9   ASCII magic "ACDLCKPT1\n"
//   bytes 10..17 manifest length, 64-bit little-endian unsigned
//   manifest     UTF-8 JSON: format version, architecture descriptor,
//                training metadata, and one entry per parameter
//                (name / shape / dtype / byte offset)
//   payload      raw little-endian 32-bit floats, concatenated in
//                manifest order

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "nn/models.hpp"

namespace acdl::train {

struct CheckpointMeta {
    uint64_t seed = 0;
    int epoch = 0;
    std::map<std::string, double> final_metrics;
};

void save_checkpoint(const nn::ModelGraph& model, const std::filesystem::path& path,
                     const CheckpointMeta& meta = {});

struct LoadedCheckpoint {
    nn::ModelGraph model;
    CheckpointMeta meta;
};

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace acdl::train
