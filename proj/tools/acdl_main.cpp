// Command-line front end. Talks to the library exclusively through the
// public C API: flags become key=value overrides applied on top of an
// optional config file, then one pipeline command runs.

#include <cstdio>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "acdl/acdl.h"

namespace {

struct PendingConfig {
    std::string config_file;
    std::vector<std::pair<std::string, std::string>> overrides;
};

// Registers a flag whose value feeds the config key of the same meaning.
void map_option(CLI::App* cmd, PendingConfig& pending, const std::string& flag,
                const std::string& key, const std::string& help) {
    cmd->add_option_function<std::string>(
        flag, [&pending, key](const std::string& v) { pending.overrides.emplace_back(key, v); },
        help);
}

void add_common(CLI::App* cmd, PendingConfig& pending) {
    cmd->add_option("--config", pending.config_file, "configuration file (key = value lines)");
    map_option(cmd, pending, "--data", "data", "dataset root directory");
    map_option(cmd, pending, "--out", "out", "output directory for run artifacts");
    map_option(cmd, pending, "--seed", "seed", "RNG seed");
    cmd->add_option_function<std::string>(
        "--set",
        [&pending](const std::string& kv) {
            const size_t eq = kv.find('=');
            if (eq == std::string::npos) throw CLI::ValidationError("--set expects key=value");
            pending.overrides.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
        },
        "set any config key (key=value, repeatable)");
    cmd->add_flag_callback(
        "--force", [&pending] { pending.overrides.emplace_back("force", "true"); },
        "overwrite non-empty targets");
}

int run(const PendingConfig& pending, acdl_status (*fn)(const acdl_config*)) {
    std::unique_ptr<acdl_config, decltype(&acdl_config_destroy)> config(acdl_config_create(),
                                                                        &acdl_config_destroy);
    if (!config) {
        std::fprintf(stderr, "error code=1 msg=\"out of memory\"\n");
        return 1;
    }
    if (!pending.config_file.empty()) {
        const acdl_status s = acdl_config_load_file(config.get(), pending.config_file.c_str());
        if (s != ACDL_OK) {
            std::fprintf(stderr, "error code=%d msg=\"%s\"\n", static_cast<int>(s), acdl_last_error());
            return static_cast<int>(s);
        }
    }
    for (const auto& [k, v] : pending.overrides) {
        const acdl_status s = acdl_config_set(config.get(), k.c_str(), v.c_str());
        if (s != ACDL_OK) {
            std::fprintf(stderr, "error code=%d msg=\"%s\"\n", static_cast<int>(s), acdl_last_error());
            return static_cast<int>(s);
        }
    }
    const acdl_status s = fn(config.get());
    if (s != ACDL_OK) {
        std::fprintf(stderr, "error code=%d msg=\"%s\"\n", static_cast<int>(s), acdl_last_error());
    }
    return static_cast<int>(s);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(acdl_version_string()) +
                 ": GAN-augmented accident-detection training pipeline"};
    app.require_subcommand(1);

    PendingConfig pending;
    acdl_status (*selected)(const acdl_config*) = nullptr;

    auto* synth = app.add_subcommand("synth-data", "generate the synthetic desk-scale dataset");
    add_common(synth, pending);
    map_option(synth, pending, "--n", "synth.per_class", "images per class per split");
    map_option(synth, pending, "--size", "synth.size", "image size (pixels)");
    synth->callback([&] { selected = &acdl_run_synth_data; });

    auto* preprocess = app.add_subcommand("preprocess", "materialize the resize/enhance chain");
    add_common(preprocess, pending);
    map_option(preprocess, pending, "--input", "input", "target image size");
    map_option(preprocess, pending, "--saturation", "enhance.saturation", "saturation gain");
    map_option(preprocess, pending, "--contrast", "enhance.contrast", "contrast gain");
    map_option(preprocess, pending, "--brightness", "enhance.brightness", "brightness offset");
    preprocess->callback([&] { selected = &acdl_run_preprocess; });

    auto* train_gan = app.add_subcommand("train-gan", "train one DCGAN per class");
    add_common(train_gan, pending);
    map_option(train_gan, pending, "--epochs", "gan.epochs", "adversarial epochs");
    map_option(train_gan, pending, "--batch", "gan.batch", "batch size");
    map_option(train_gan, pending, "--lr", "gan.lr", "learning rate");
    map_option(train_gan, pending, "--loss", "gan.loss", "adversarial loss (bce|lsgan)");
    map_option(train_gan, pending, "--latent", "gan.latent", "latent dimension");
    map_option(train_gan, pending, "--image", "gan.image", "GAN image size (defaults to --input)");
    map_option(train_gan, pending, "--input", "input", "dataset image size");
    map_option(train_gan, pending, "--save-interval", "gan.save_interval", "sample grid interval");
    map_option(train_gan, pending, "--report-interval", "gan.report_interval", "progress interval");
    train_gan->callback([&] { selected = &acdl_run_train_gan; });

    auto* augment = app.add_subcommand("augment", "merge generated images into the train split");
    add_common(augment, pending);
    map_option(augment, pending, "--gen0", "augment.gen0", "class-0 generator checkpoint");
    map_option(augment, pending, "--gen1", "augment.gen1", "class-1 generator checkpoint");
    map_option(augment, pending, "--n", "augment.per_class", "generated images per class");
    map_option(augment, pending, "--batch-id", "augment.batch_id", "generation batch id");
    augment->callback([&] { selected = &acdl_run_augment; });

    auto* train = app.add_subcommand("train", "train a classifier");
    add_common(train, pending);
    map_option(train, pending, "--model", "model", "architecture (cnn|ftcnn|vit)");
    map_option(train, pending, "--input", "input", "input image size");
    map_option(train, pending, "--epochs", "epochs", "max training epochs");
    map_option(train, pending, "--batch", "batch", "batch size");
    map_option(train, pending, "--lr", "lr", "learning rate");
    map_option(train, pending, "--target-acc", "target_acc", "stop once train accuracy reaches this");
    map_option(train, pending, "--patch", "vit.patch", "ViT patch size");
    map_option(train, pending, "--dim", "vit.dim", "ViT projection dimension");
    map_option(train, pending, "--heads", "vit.heads", "ViT attention heads");
    map_option(train, pending, "--layers", "vit.layers", "ViT transformer layers");
    map_option(train, pending, "--mlp", "vit.mlp", "ViT MLP hidden units");
    train->callback([&] { selected = &acdl_run_train; });

    auto* evaluate = app.add_subcommand("evaluate", "score a checkpoint on a dataset split");
    add_common(evaluate, pending);
    map_option(evaluate, pending, "--checkpoint", "checkpoint", "model checkpoint path");
    map_option(evaluate, pending, "--split", "split", "dataset split (train|val|test)");
    evaluate->callback([&] { selected = &acdl_run_evaluate; });

    auto* report = app.add_subcommand("report", "render a stored metrics file");
    add_common(report, pending);
    map_option(report, pending, "--metrics", "metrics", "metrics.json produced by evaluate");
    report->callback([&] { selected = &acdl_run_report; });

    CLI11_PARSE(app, argc, argv);
    return run(pending, selected);
}
