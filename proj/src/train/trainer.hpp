#pragma once

// Classifier training loop: seeded shuffling, minibatch BCE + Adam, a full
// validation pass per epoch, curve logging, and best-val model selection.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "data/dataset.hpp"
#include "nn/models.hpp"

namespace acdl::train {

struct TrainRun {
    int epochs = 50;
    int batch_size = 32;
    double lr = 1e-3;
    uint64_t seed = 42;
    // Stop once the running train accuracy reaches this bar (0 disables);
    // `epochs` is then the maximum.
    double target_train_acc = 0.0;
    bool select_best_val = true;
};

struct CurvePoint {
    int epoch = 0;  // 1-based
    double train_loss = 0.0;
    double train_acc = 0.0;
    double val_loss = 0.0;
    double val_acc = 0.0;
};

struct TrainResult {
    std::vector<CurvePoint> curves;
    int best_epoch = 0;  // epoch with highest val accuracy (1-based, 0 if none)
    double best_val_acc = 0.0;
};

TrainResult train_classifier(nn::ModelGraph& model, const data::LabeledBatch& train_data,
                             const data::LabeledBatch& val_data, const TrainRun& run,
                             std::ostream* progress = nullptr);

struct EvalResult {
    std::vector<int> labels;
    std::vector<float> scores;
    std::vector<int> predictions;
    double loss = 0.0;
    double accuracy = 0.0;
};

// Eval-mode pass over a loaded split, batched, deterministic order.
EvalResult evaluate(nn::ModelGraph& model, const data::LabeledBatch& data, int batch_size = 64);

// CSV with header epoch,train_loss,train_acc,val_loss,val_acc; 6-decimal
// fixed point, one row per epoch.
void log_curves(const std::vector<CurvePoint>& curves, const std::filesystem::path& path);
std::vector<CurvePoint> read_curves(const std::filesystem::path& path);

}  // namespace acdl::train
