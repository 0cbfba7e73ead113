#pragma once

// Desk-scale synthetic dataset: class 0 is a low-contrast road-like texture
// (horizontal gradient plus noise), class 1 adds a cluster of bright
// high-contrast blobs, so the classes are separable by construction.

#include <cstdint>
#include <filesystem>
#include <string>

#include "data/dataset.hpp"

namespace acdl::data {

struct SyntheticSpec {
    uint64_t seed = 42;
    int n_per_class = 32;  // per split
    int size = 64;
    std::array<std::string, 2> class_names = kDefaultClassNames;
};

// Renders one synthetic image (deterministic in all arguments).
ImageBuffer synthetic_image(const SyntheticSpec& spec, const std::string& split, int label,
                            int index);

// Writes train/val/test under `root` plus a manifest.json recording the seed,
// counts and generator version. Byte-identical for identical specs.
DatasetIndex make_synthetic_dataset(const std::filesystem::path& root, const SyntheticSpec& spec);

}  // namespace acdl::data
