#pragma once

// Dataset discovery under the <root>/{train,val,test}/{class0,class1}/*.ppm
// layout, batch assembly into tensors, and merging of generated images into
// the training split.

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "core/tensor.hpp"
#include "data/image.hpp"

namespace acdl::data {

inline const std::array<std::string, 2> kDefaultClassNames = {"Non Accident", "Accident"};
inline const std::array<std::string, 3> kSplitNames = {"train", "val", "test"};

struct SplitIndex {
    std::string split;
    // files[label] holds the sorted file list for that class.
    std::array<std::vector<std::filesystem::path>, 2> files;

    int64_t count(int label) const { return static_cast<int64_t>(files[static_cast<size_t>(label)].size()); }
    int64_t total() const { return count(0) + count(1); }
};

struct DatasetIndex {
    std::filesystem::path root;
    std::array<std::string, 2> class_names = kDefaultClassNames;
    SplitIndex train, val, test;

    const SplitIndex& split(const std::string& name) const;
};

// Walks the layout, sorts files lexicographically, validates headers and
// rejects duplicate files. Missing split directory or an empty class in the
// train split is an error naming the offending path.
DatasetIndex index_dataset(const std::filesystem::path& root,
                           const std::array<std::string, 2>& class_names = kDefaultClassNames);

// A batch of normalized image tensors plus binary labels.
struct LabeledBatch {
    TensorF images;  // [N,H,W,3] in [0,1]
    std::vector<int> labels;
};

// Loads every file of a split: decode -> resize to (size x size) ->
// normalize -> enhance. Order follows the index (class 0 files then class 1).
LabeledBatch load_split(const SplitIndex& split, int size, const EnhanceParams& enhance_params);

// Gathers rows of a loaded split into a minibatch.
LabeledBatch gather(const LabeledBatch& all, const std::vector<int>& rows);

// Content digest of a split's files (order-sensitive FNV over names + bytes);
// used to prove augmentation leaves val/test untouched.
uint64_t split_digest(const SplitIndex& split);

// Writes generated images into the train split as
// <class dir>/gan_<batch_id>_<index>.ppm and re-indexes the dataset.
// Idempotent for a fixed batch id. Image sizes must match the existing
// dataset files.
DatasetIndex merge_augmented(const DatasetIndex& index, const std::vector<ImageReal>& images,
                             const std::vector<int>& labels, const std::string& batch_id);

}  // namespace acdl::data
