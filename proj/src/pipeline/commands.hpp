#pragma once

// Pipeline commands behind the CLI: each takes a resolved configuration,
// writes its artifacts under the run's output directory, and throws
// UsageError for misuse (exit 2) or Error for runtime failures (exit 1).

#include <iosfwd>

#include "pipeline/config.hpp"

namespace acdl::pipeline {

// <root>/{train,val,test}/{class0,class1}/*.ppm plus manifest.json.
void cmd_synth_data(const RunConfig& config, std::ostream& out);

// Materializes the resize+enhance chain into a new dataset root.
void cmd_preprocess(const RunConfig& config, std::ostream& out);

// Trains one DCGAN per class; writes gan_class<i>.gen.ckpt /
// gan_class<i>.disc.ckpt and per-class sample grids under the output dir.
void cmd_train_gan(const RunConfig& config, std::ostream& out);

// Generates augment.per_class images from each per-class generator and
// merges them into the train split.
void cmd_augment(const RunConfig& config, std::ostream& out);

// Trains the configured classifier; writes model.ckpt, curves.csv and the
// resolved config.
void cmd_train(const RunConfig& config, std::ostream& out);

// Evaluates a checkpoint on a split; writes metrics.json, roc.csv and
// predictions.csv.
void cmd_evaluate(const RunConfig& config, std::ostream& out);

// Renders a stored metrics.json as a classification report (stdout +
// report.txt).
void cmd_report(const RunConfig& config, std::ostream& out);

// Resolved output directory for a config (creates it).
std::filesystem::path ensure_out_dir(const RunConfig& config);

}  // namespace acdl::pipeline
