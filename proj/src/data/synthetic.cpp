#include "data/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "core/rng.hpp"
#include "data/ppm.hpp"
#include "json.hpp"

namespace acdl::data {

namespace fs = std::filesystem;

namespace {

uint64_t stream_id(const std::string& split, int label, int index) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (const char c : split) h = (h ^ static_cast<uint8_t>(c)) * 0x100000001b3ull;
    h = (h ^ static_cast<uint64_t>(label + 1)) * 0x100000001b3ull;
    h = (h ^ static_cast<uint64_t>(index + 1)) * 0x100000001b3ull;
    return h;
}

}  // namespace

ImageBuffer synthetic_image(const SyntheticSpec& spec, const std::string& split, int label,
                            int index) {
    if (spec.size < 16) throw ValueError("synthetic: size must be >= 16");
    RandomSource rng = RandomSource(spec.seed).fork(stream_id(split, label, index));
    const int S = spec.size;
    std::vector<double> lum(static_cast<size_t>(S) * S);

    // Low-contrast road texture: horizontal gradient plus uniform noise.
    const double base = rng.uniform(0.22, 0.30);
    const double slope = rng.uniform(0.12, 0.20);
    for (int y = 0; y < S; ++y) {
        for (int x = 0; x < S; ++x) {
            const double g = base + slope * (static_cast<double>(x) / (S - 1));
            lum[static_cast<size_t>(y) * S + x] = g + rng.uniform(-0.06, 0.06);
        }
    }

    if (label == 1) {
        // Bright blob cluster; peaks near 1.0 make the max-patch feature
        // separate the classes on its own.
        const int blobs = 2 + rng.uniform_int(3);
        const double ccx = rng.uniform(0.25, 0.75) * S;
        const double ccy = rng.uniform(0.25, 0.75) * S;
        for (int b = 0; b < blobs; ++b) {
            const double cx = std::clamp(ccx + rng.uniform(-0.12, 0.12) * S, 0.0, S - 1.0);
            const double cy = std::clamp(ccy + rng.uniform(-0.12, 0.12) * S, 0.0, S - 1.0);
            const double sigma = rng.uniform(S / 14.0, S / 9.0);
            const double peak = rng.uniform(0.75, 0.95);
            for (int y = 0; y < S; ++y) {
                for (int x = 0; x < S; ++x) {
                    const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
                    lum[static_cast<size_t>(y) * S + x] += peak * std::exp(-d2 / (2.0 * sigma * sigma));
                }
            }
        }
    }

    ImageBuffer img;
    img.height = S;
    img.width = S;
    img.pixels.resize(img.expected_bytes());
    const double tint_r = rng.uniform(-0.02, 0.02);
    const double tint_b = rng.uniform(-0.02, 0.02);
    for (size_t p = 0; p < lum.size(); ++p) {
        const double v = std::clamp(lum[p], 0.0, 1.0);
        const double r = std::clamp(v + tint_r, 0.0, 1.0);
        const double b = std::clamp(v + tint_b, 0.0, 1.0);
        img.pixels[p * 3 + 0] = static_cast<uint8_t>(std::floor(r * 255.0 + 0.5));
        img.pixels[p * 3 + 1] = static_cast<uint8_t>(std::floor(v * 255.0 + 0.5));
        img.pixels[p * 3 + 2] = static_cast<uint8_t>(std::floor(b * 255.0 + 0.5));
    }
    return img;
}

DatasetIndex make_synthetic_dataset(const fs::path& root, const SyntheticSpec& spec) {
    if (spec.n_per_class <= 0) throw ValueError("synthetic: n_per_class must be positive");
    for (const std::string& split : kSplitNames) {
        for (int label = 0; label < 2; ++label) {
            const fs::path dir = root / split / spec.class_names[static_cast<size_t>(label)];
            fs::create_directories(dir);
            for (int i = 0; i < spec.n_per_class; ++i) {
                char name[32];
                std::snprintf(name, sizeof(name), "img_%04d.ppm", i);
                write_ppm(dir / name, synthetic_image(spec, split, label, i));
            }
        }
    }
    nlohmann::json manifest;
    manifest["generator_version"] = 1;
    manifest["seed"] = spec.seed;
    manifest["n_per_class"] = spec.n_per_class;
    manifest["size"] = spec.size;
    manifest["class_names"] = {spec.class_names[0], spec.class_names[1]};
    nlohmann::json counts;
    for (const std::string& split : kSplitNames) {
        counts[split] = {{spec.class_names[0], spec.n_per_class}, {spec.class_names[1], spec.n_per_class}};
    }
    manifest["counts"] = counts;
    std::ofstream out(root / "manifest.json");
    if (!out) throw IoError("cannot write " + (root / "manifest.json").string());
    out << manifest.dump(2) << "\n";
    return index_dataset(root, spec.class_names);
}

}  // namespace acdl::data
