#include "pipeline/commands.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "data/ppm.hpp"
#include "data/synthetic.hpp"
#include "metrics/metrics.hpp"
#include "train/checkpoint.hpp"
#include "train/gan.hpp"
#include "train/trainer.hpp"

namespace acdl::pipeline {

namespace fs = std::filesystem;

namespace {

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y%m%d-%H%M%S", &tm);
    return buf;
}

void echo_config(const RunConfig& config, const fs::path& out_dir) {
    std::ofstream out(out_dir / "config.txt", std::ios::trunc);
    if (!out) throw IoError("cannot write " + (out_dir / "config.txt").string());
    out << serialize_config(config);
}

data::EnhanceParams enhance_of(const RunConfig& config) {
    return {config.enhance_saturation, config.enhance_contrast, config.enhance_brightness};
}

std::array<std::string, 2> class_names_of(const RunConfig& config) {
    return {config.class0, config.class1};
}

int gan_image_size(const RunConfig& config) {
    return config.gan_image > 0 ? config.gan_image : config.input;
}

// Rows of a loaded split belonging to one class.
std::vector<int> rows_with_label(const data::LabeledBatch& batch, int label) {
    std::vector<int> rows;
    for (size_t i = 0; i < batch.labels.size(); ++i) {
        if (batch.labels[i] == label) rows.push_back(static_cast<int>(i));
    }
    return rows;
}

nn::ModelGraph build_classifier(const RunConfig& config) {
    const nn::InputSpec input{config.input, config.input, 3};
    if (config.model == "cnn") return nn::build_cnn(input, config.seed);
    if (config.model == "ftcnn") return nn::build_ftcnn(input, config.seed);
    if (config.model == "vit") {
        nn::VitConfig vit;
        vit.input = input;
        vit.patch_size = config.vit_patch;
        vit.projection_dim = config.vit_dim;
        vit.heads = config.vit_heads;
        vit.transformer_layers = config.vit_layers;
        vit.mlp_hidden = config.vit_mlp;
        return nn::build_vit(vit, config.seed);
    }
    throw UsageError("config: unknown model '" + config.model + "' (expected cnn, ftcnn or vit)");
}

double classifier_lr(const RunConfig& config) {
    // The ViT default learning rate is 3e-4; cnn/ftcnn use 1e-3. An explicit
    // lr always wins.
    if (!config.was_set("lr") && config.model == "vit") return 3e-4;
    return config.lr;
}

}  // namespace

fs::path ensure_out_dir(const RunConfig& config) {
    fs::path dir = config.out_dir.empty()
                       ? fs::path("runs") / (timestamp_utc() + "_" + std::to_string(config.seed))
                       : fs::path(config.out_dir);
    fs::create_directories(dir);
    return dir;
}

void cmd_synth_data(const RunConfig& config, std::ostream& out) {
    const fs::path root = config.data_root;
    if (fs::exists(root) && !fs::is_empty(root) && !config.force) {
        throw UsageError("synth-data: target " + root.string() +
                         " is not empty (pass force=true / --force to overwrite)");
    }
    data::SyntheticSpec spec;
    spec.seed = config.seed;
    spec.n_per_class = config.synth_per_class;
    spec.size = config.synth_size;
    spec.class_names = class_names_of(config);
    const data::DatasetIndex idx = data::make_synthetic_dataset(root, spec);
    const fs::path out_dir = ensure_out_dir(config);
    echo_config(config, out_dir);
    out << "synth-data: wrote " << idx.train.total() << " train / " << idx.val.total() << " val / "
        << idx.test.total() << " test files under " << root.string() << "\n";
}

void cmd_preprocess(const RunConfig& config, std::ostream& out) {
    const data::DatasetIndex idx = data::index_dataset(config.data_root, class_names_of(config));
    const fs::path out_dir = ensure_out_dir(config);
    echo_config(config, out_dir);
    const fs::path target = out_dir / "preprocessed";
    const data::EnhanceParams params = enhance_of(config);
    int64_t files = 0;
    for (const std::string& split : data::kSplitNames) {
        const data::SplitIndex& s = idx.split(split);
        for (int label = 0; label < 2; ++label) {
            const fs::path dir = target / split / idx.class_names[static_cast<size_t>(label)];
            fs::create_directories(dir);
            for (const fs::path& file : s.files[static_cast<size_t>(label)]) {
                data::ImageBuffer img = data::read_ppm(file);
                img = data::resize(img, config.input, config.input);
                const data::ImageReal real = data::enhance(data::normalize(img), params);
                data::write_ppm(dir / file.filename(), data::quantize(real));
                ++files;
            }
        }
    }
    out << "preprocess: wrote " << files << " files under " << target.string() << "\n";
}

void cmd_train_gan(const RunConfig& config, std::ostream& out) {
    const data::DatasetIndex idx = data::index_dataset(config.data_root, class_names_of(config));
    const fs::path out_dir = ensure_out_dir(config);
    echo_config(config, out_dir);
    const int size = gan_image_size(config);
    const data::LabeledBatch train = data::load_split(idx.train, size, enhance_of(config));

    for (int label = 0; label < 2; ++label) {
        const std::vector<int> rows = rows_with_label(train, label);
        const data::LabeledBatch class_data = data::gather(train, rows);
        train::GanTrainConfig gan;
        gan.batch_size = std::min(config.gan_batch, static_cast<int>(rows.size()));
        if (gan.batch_size < 2) throw UsageError("train-gan: class " + std::to_string(label) +
                                                 " has fewer than 2 training images");
        gan.epochs = config.gan_epochs;
        gan.loss = config.gan_loss == "lsgan" ? train::GanLoss::lsgan : train::GanLoss::bce;
        if (config.gan_loss != "lsgan" && config.gan_loss != "bce") {
            throw UsageError("config: gan.loss must be bce or lsgan, got '" + config.gan_loss + "'");
        }
        gan.lr = config.gan_lr;
        gan.beta1 = config.gan_beta1;
        gan.report_interval = config.gan_report_interval;
        gan.save_interval = config.gan_save_interval;
        gan.seed = config.seed + static_cast<uint64_t>(label);
        gan.latent.dim = config.gan_latent;

        nn::GanPair pair = nn::build_dcgan(config.gan_latent, {size, size, 3}, gan.seed);
        out << "train-gan: class " << label << " ('" << idx.class_names[static_cast<size_t>(label)]
            << "'), " << rows.size() << " images, batch " << gan.batch_size << "\n";
        const fs::path samples = out_dir / ("gan_class" + std::to_string(label)) / "samples";
        train::train_gan(pair.generator, pair.discriminator, class_data.images, gan, samples, &out);

        train::CheckpointMeta meta;
        meta.seed = gan.seed;
        meta.epoch = gan.epochs;
        const std::string base = "gan_class" + std::to_string(label);
        train::save_checkpoint(pair.generator, out_dir / (base + ".gen.ckpt"), meta);
        train::save_checkpoint(pair.discriminator, out_dir / (base + ".disc.ckpt"), meta);
        out << "train-gan: saved " << (out_dir / (base + ".gen.ckpt")).string() << "\n";
    }
}

void cmd_augment(const RunConfig& config, std::ostream& out) {
    if (config.augment_gen0.empty() || config.augment_gen1.empty()) {
        throw UsageError("augment: generator checkpoints required (augment.gen0 / augment.gen1)");
    }
    const data::DatasetIndex idx = data::index_dataset(config.data_root, class_names_of(config));
    const fs::path out_dir = ensure_out_dir(config);
    echo_config(config, out_dir);

    const uint64_t val_digest = data::split_digest(idx.val);
    const uint64_t test_digest = data::split_digest(idx.test);
    const int64_t before = idx.train.total();

    std::vector<data::ImageReal> images;
    std::vector<int> labels;
    const std::string gens[2] = {config.augment_gen0, config.augment_gen1};
    for (int label = 0; label < 2; ++label) {
        train::LoadedCheckpoint ckpt = train::load_checkpoint(gens[static_cast<size_t>(label)]);
        if (ckpt.model.tag() != nn::ArchTag::gan_generator) {
            throw UsageError("augment: " + gens[static_cast<size_t>(label)] +
                             " is not a generator checkpoint");
        }
        std::vector<data::ImageReal> generated = train::generate_images(
            ckpt.model, config.augment_per_class, config.seed + static_cast<uint64_t>(label));
        for (auto& img : generated) {
            images.push_back(std::move(img));
            labels.push_back(label);
        }
    }
    const std::string batch_id = config.augment_batch_id.empty()
                                     ? "s" + std::to_string(config.seed)
                                     : config.augment_batch_id;
    const data::DatasetIndex merged = data::merge_augmented(idx, images, labels, batch_id);

    if (data::split_digest(merged.val) != val_digest || data::split_digest(merged.test) != test_digest) {
        throw Error("augment: val/test splits changed; augmentation must only touch train");
    }
    out << "augment: train " << before << " -> " << merged.train.total()
        << " files (batch id " << batch_id << "); val/test digests unchanged\n";
}

void cmd_train(const RunConfig& config, std::ostream& out) {
    const data::DatasetIndex idx = data::index_dataset(config.data_root, class_names_of(config));
    const fs::path out_dir = ensure_out_dir(config);
    echo_config(config, out_dir);
    const data::EnhanceParams params = enhance_of(config);
    const data::LabeledBatch train_data = data::load_split(idx.train, config.input, params);
    const data::LabeledBatch val_data = data::load_split(idx.val, config.input, params);

    nn::ModelGraph model = build_classifier(config);
    out << model.summary();

    train::TrainRun run;
    run.epochs = config.epochs;
    run.batch_size = config.batch;
    run.lr = classifier_lr(config);
    run.seed = config.seed;
    run.target_train_acc = config.target_acc;
    if (config.loss != "bce") throw UsageError("config: classifier loss must be bce");

    const train::TrainResult result = train::train_classifier(model, train_data, val_data, run, &out);
    train::log_curves(result.curves, out_dir / "curves.csv");

    train::CheckpointMeta meta;
    meta.seed = config.seed;
    meta.epoch = static_cast<int>(result.curves.size());
    if (!result.curves.empty()) {
        meta.final_metrics["train_acc"] = result.curves.back().train_acc;
        meta.final_metrics["val_acc"] = result.best_epoch > 0 ? result.best_val_acc
                                                              : result.curves.back().val_acc;
    }
    train::save_checkpoint(model, out_dir / "model.ckpt", meta);
    out << "train: saved " << (out_dir / "model.ckpt").string() << " (best val epoch "
        << result.best_epoch << ")\n";
}

void cmd_evaluate(const RunConfig& config, std::ostream& out) {
    if (config.checkpoint.empty()) {
        throw UsageError("evaluate: no checkpoint configured (set checkpoint=<path>)");
    }
    train::LoadedCheckpoint ckpt = train::load_checkpoint(config.checkpoint);
    if (!ckpt.model.is_classifier()) {
        throw UsageError("evaluate: " + config.checkpoint + " is not a classifier checkpoint");
    }
    const data::DatasetIndex idx = data::index_dataset(config.data_root, class_names_of(config));
    const fs::path out_dir = ensure_out_dir(config);
    echo_config(config, out_dir);
    const int size = ckpt.model.input_spec().height;
    const data::LabeledBatch split_data =
        data::load_split(idx.split(config.split), size, enhance_of(config));

    const train::EvalResult eval = train::evaluate(ckpt.model, split_data);
    std::vector<double> scores(eval.scores.begin(), eval.scores.end());
    const metrics::MetricsReport report =
        metrics::compute_report(eval.labels, scores, class_names_of(config));
    metrics::write_report_json(report, out_dir / "metrics.json");
    metrics::write_roc_csv(report.roc, out_dir / "roc.csv");

    std::ofstream preds(out_dir / "predictions.csv", std::ios::trunc);
    preds << "index,label,score,prediction\n";
    for (size_t i = 0; i < eval.labels.size(); ++i) {
        char line[96];
        std::snprintf(line, sizeof(line), "%zu,%d,%.6f,%d\n", i, eval.labels[i],
                      static_cast<double>(eval.scores[i]), eval.predictions[i]);
        preds << line;
    }

    char summary[160];
    std::snprintf(summary, sizeof(summary),
                  "evaluate: split=%s n=%zu accuracy=%.6f loss=%.6f auc=%.6f\n",
                  config.split.c_str(), eval.labels.size(), eval.accuracy, eval.loss,
                  report.roc.auc);
    out << summary;
}

void cmd_report(const RunConfig& config, std::ostream& out) {
    fs::path metrics_path = config.metrics_file;
    if (metrics_path.empty()) {
        if (config.out_dir.empty()) {
            throw UsageError("report: no metrics file configured (set metrics=<path> or out=<dir>)");
        }
        metrics_path = fs::path(config.out_dir) / "metrics.json";
    }
    if (!fs::exists(metrics_path)) {
        throw UsageError("report: metrics file not found: " + metrics_path.string());
    }
    const metrics::MetricsReport report = metrics::read_report_json(metrics_path);
    const std::string text = metrics::render_report(report);
    const fs::path out_dir = ensure_out_dir(config);
    echo_config(config, out_dir);
    std::ofstream file(out_dir / "report.txt", std::ios::trunc);
    if (!file) throw IoError("cannot write " + (out_dir / "report.txt").string());
    file << text;
    out << text;
}

}  // namespace acdl::pipeline
