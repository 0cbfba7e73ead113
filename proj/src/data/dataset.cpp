#include "data/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "data/ppm.hpp"

namespace acdl::data {

namespace fs = std::filesystem;

const SplitIndex& DatasetIndex::split(const std::string& name) const {
    if (name == "train") return train;
    if (name == "val") return val;
    if (name == "test") return test;
    throw ValueError("unknown split '" + name + "' (expected train, val or test)");
}

namespace {

SplitIndex index_split(const fs::path& root, const std::string& split,
                       const std::array<std::string, 2>& class_names,
                       std::set<std::string>& seen_canonical) {
    const fs::path split_dir = root / split;
    if (!fs::is_directory(split_dir)) {
        throw UsageError("dataset: missing split directory " + split_dir.string());
    }
    SplitIndex out;
    out.split = split;
    for (int label = 0; label < 2; ++label) {
        const fs::path class_dir = split_dir / class_names[static_cast<size_t>(label)];
        if (!fs::is_directory(class_dir)) {
            throw UsageError("dataset: missing class directory " + class_dir.string());
        }
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(class_dir)) {
            if (!entry.is_regular_file()) continue;
            files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end(),
                  [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
        for (const fs::path& f : files) {
            validate_ppm_file(f);
            const std::string canon = fs::weakly_canonical(f).string();
            if (!seen_canonical.insert(canon).second) {
                throw UsageError("dataset: file " + canon + " is indexed twice (ambiguous label)");
            }
        }
        out.files[static_cast<size_t>(label)] = std::move(files);
    }
    if (split == "train" && (out.count(0) == 0 || out.count(1) == 0)) {
        const int empty = out.count(0) == 0 ? 0 : 1;
        throw UsageError("dataset: empty class '" + class_names[static_cast<size_t>(empty)] +
                         "' in " + (root / split).string());
    }
    return out;
}

}  // namespace

DatasetIndex index_dataset(const fs::path& root, const std::array<std::string, 2>& class_names) {
    if (!fs::is_directory(root)) throw UsageError("dataset: root " + root.string() + " does not exist");
    if (class_names[0] == class_names[1]) {
        throw UsageError("dataset: class names must differ, got '" + class_names[0] + "' twice");
    }
    DatasetIndex idx;
    idx.root = root;
    idx.class_names = class_names;
    std::set<std::string> seen;
    idx.train = index_split(root, "train", class_names, seen);
    idx.val = index_split(root, "val", class_names, seen);
    idx.test = index_split(root, "test", class_names, seen);
    return idx;
}

LabeledBatch load_split(const SplitIndex& split, int size, const EnhanceParams& enhance_params) {
    const int64_t n = split.total();
    if (n == 0) throw UsageError("dataset: split '" + split.split + "' is empty");
    LabeledBatch out;
    out.labels.reserve(static_cast<size_t>(n));
    std::vector<float> data;
    data.reserve(static_cast<size_t>(n) * size * size * 3);
    for (int label = 0; label < 2; ++label) {
        for (const auto& file : split.files[static_cast<size_t>(label)]) {
            ImageBuffer img = read_ppm(file);
            img = resize(img, size, size);
            ImageReal real = enhance(normalize(img), enhance_params);
            data.insert(data.end(), real.pixels.begin(), real.pixels.end());
            out.labels.push_back(label);
        }
    }
    out.images = TensorF::from_data({static_cast<int>(n), size, size, 3}, std::move(data));
    return out;
}

LabeledBatch gather(const LabeledBatch& all, const std::vector<int>& rows) {
    if (rows.empty()) throw ValueError("gather: empty row list");
    const auto& shape = all.images.shape();
    const int64_t row_elems = numel(shape) / shape[0];
    std::vector<float> data;
    data.reserve(rows.size() * static_cast<size_t>(row_elems));
    LabeledBatch out;
    const auto src = all.images.values();
    for (int r : rows) {
        if (r < 0 || r >= shape[0]) throw ValueError("gather: row out of range");
        data.insert(data.end(), src.begin() + r * row_elems, src.begin() + (r + 1) * row_elems);
        out.labels.push_back(all.labels[static_cast<size_t>(r)]);
    }
    Shape s = shape;
    s[0] = static_cast<int>(rows.size());
    out.images = TensorF::from_data(std::move(s), std::move(data));
    return out;
}

uint64_t split_digest(const SplitIndex& split) {
    uint64_t h = 1469598103934665603ull;  // FNV-1a
    auto mix = [&h](const uint8_t* p, size_t n) {
        for (size_t i = 0; i < n; ++i) {
            h ^= p[i];
            h *= 1099511628211ull;
        }
    };
    for (int label = 0; label < 2; ++label) {
        for (const auto& file : split.files[static_cast<size_t>(label)]) {
            const std::string name = file.filename().string();
            mix(reinterpret_cast<const uint8_t*>(name.data()), name.size());
            const ImageBuffer img = read_ppm(file);
            mix(img.pixels.data(), img.pixels.size());
        }
    }
    return h;
}

DatasetIndex merge_augmented(const DatasetIndex& index, const std::vector<ImageReal>& images,
                             const std::vector<int>& labels, const std::string& batch_id) {
    if (images.size() != labels.size()) {
        throw ValueError("merge: " + std::to_string(images.size()) + " images vs " +
                         std::to_string(labels.size()) + " labels");
    }
    if (batch_id.empty()) throw ValueError("merge: batch id must not be empty");
    // Generated images must match the size of what is already on disk.
    int want_h = 0, want_w = 0;
    const auto& probe_list = index.train.files[0].empty() ? index.train.files[1] : index.train.files[0];
    validate_ppm_file(probe_list.front(), &want_h, &want_w);
    std::array<int, 2> counter = {0, 0};
    for (size_t i = 0; i < images.size(); ++i) {
        const int label = labels[i];
        if (label != 0 && label != 1) throw ValueError("merge: labels must be 0 or 1");
        if (images[i].height != want_h || images[i].width != want_w) {
            throw ShapeError("merge: generated image " + std::to_string(images[i].height) + "x" +
                             std::to_string(images[i].width) + " does not match dataset " +
                             std::to_string(want_h) + "x" + std::to_string(want_w));
        }
        ImageBuffer img = quantize(images[i]);
        img.provenance = Provenance::synthetic;
        char suffix[16];
        std::snprintf(suffix, sizeof(suffix), "%04d", counter[static_cast<size_t>(label)]++);
        const std::string name = "gan_" + batch_id + "_" + suffix + ".ppm";
        write_ppm(index.root / "train" / index.class_names[static_cast<size_t>(label)] / name, img);
    }
    return index_dataset(index.root, index.class_names);
}

}  // namespace acdl::data
