#pragma once

// Run configuration: every knob has a default; values from a config file
// override defaults and command-line flags override the file. The file
// dialect is line-based key = value with '#' comments, dotted keys, and
// optional [section] headers that prefix the keys below them.

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "core/error.hpp"

namespace acdl::pipeline {

struct RunConfig {
    // Shared
    std::string data_root = "data";
    std::string out_dir;  // empty -> runs/<timestamp>_<seed>
    std::string model = "cnn";
    int input = 64;
    uint64_t seed = 42;
    bool force = false;
    std::string class0 = "Non Accident";
    std::string class1 = "Accident";

    // Classifier training
    int epochs = 50;
    int batch = 32;
    double lr = 1e-3;  // ViT defaults to 3e-4 unless lr was set explicitly
    double target_acc = 0.0;
    std::string loss = "bce";

    // Evaluation / reporting
    std::string checkpoint;
    std::string split = "test";
    std::string metrics_file;

    // ViT
    int vit_patch = 16;
    int vit_dim = 64;
    int vit_heads = 4;
    int vit_layers = 8;
    int vit_mlp = 128;

    // GAN
    int gan_latent = 100;
    double gan_lr = 2e-4;
    double gan_beta1 = 0.5;
    int gan_epochs = 200;
    int gan_batch = 32;
    std::string gan_loss = "bce";
    int gan_image = 0;  // 0 -> use `input`
    int gan_report_interval = 100;
    int gan_save_interval = 50;

    // Augmentation
    int augment_per_class = 32;
    std::string augment_gen0;
    std::string augment_gen1;
    std::string augment_batch_id;  // empty -> derived from seed

    // Synthetic data
    int synth_per_class = 32;
    int synth_size = 64;

    // Enhancement
    double enhance_saturation = 1.3;
    double enhance_contrast = 1.2;
    double enhance_brightness = 0.05;

    // Keys that were set explicitly (file or flag).
    std::set<std::string> set_keys;

    bool was_set(const std::string& key) const { return set_keys.count(key) > 0; }
};

// All known keys, for validation and echo.
std::vector<std::string> config_keys();

// Sets one key from its string form. Unknown keys raise UsageError with a
// nearest-key suggestion; bad values raise UsageError.
void config_set(RunConfig& config, const std::string& key, const std::string& value);

// Parse errors carry the 1-based line number.
void load_config_file(RunConfig& config, const std::filesystem::path& path);

// Convenience: defaults <- optional file <- flag overrides (left to right).
RunConfig resolve_config(const std::filesystem::path& file,
                         const std::vector<std::pair<std::string, std::string>>& overrides);

// Canonical echo of the resolved configuration (parseable by
// load_config_file).
std::string serialize_config(const RunConfig& config);

// Current value of one key, in its string form.
std::string config_get(const RunConfig& config, const std::string& key);

}  // namespace acdl::pipeline
