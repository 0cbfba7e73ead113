#pragma once

// Adversarial training loop: latent sampling, alternating discriminator /
// generator updates with the counterpart frozen, progress reporting, and
// periodic sample grids.

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "data/image.hpp"
#include "nn/models.hpp"
#include "nn/optim.hpp"

namespace acdl::train {

struct LatentSpec {
    int dim = 100;
    double mean = 0.0;
    double stddev = 1.0;
};

enum class GanLoss { bce, lsgan };

struct GanTrainConfig {
    int batch_size = 32;
    int epochs = 200;
    GanLoss loss = GanLoss::bce;
    double lr = 2e-4;
    double beta1 = 0.5;
    double beta2 = 0.999;
    double eps = 1e-8;
    int report_interval = 100;
    int save_interval = 50;
    uint64_t seed = 42;
    LatentSpec latent;
    // Test mode: assert bitwise, on every step, that the generator update
    // left the discriminator's trainable parameters untouched and vice versa.
    bool verify_freeze = false;
};

// [b, dim] of i.i.d. N(mean, stddev^2) draws.
TensorF sample_latent(const LatentSpec& spec, int b, RandomSource& rng);

struct GanStepStats {
    double d_loss = 0.0;
    double g_loss = 0.0;
    double d_acc_real = 0.0;
    double d_acc_fake = 0.0;

    double d_acc() const { return 0.5 * (d_acc_real + d_acc_fake); }
};

// One adversarial step on one real batch: exactly one discriminator update
// (b real labelled 1 + b fake labelled 0), then one generator update on b
// fresh latents labelled 1 while the discriminator is frozen.
GanStepStats gan_epoch(nn::ModelGraph& generator, nn::ModelGraph& discriminator,
                       const TensorF& real_batch, const GanTrainConfig& config,
                       nn::Adam<float>& gen_opt, nn::Adam<float>& disc_opt, RandomSource& rng);

struct GanTrainResult {
    std::vector<GanStepStats> per_epoch;  // mean stats per epoch
    int steps = 0;
};

// Runs `epochs` passes over shuffled real batches. Progress lines
// "epoch=<n> l_d=<f> l_g=<f> d_acc=<f>" are emitted every report_interval
// epochs; an 8x8 sample grid is written to <sample_dir>/epoch_<n>.ppm every
// save_interval epochs (sample_dir empty disables).
GanTrainResult train_gan(nn::ModelGraph& generator, nn::ModelGraph& discriminator,
                         const TensorF& real_images, const GanTrainConfig& config,
                         const std::filesystem::path& sample_dir = {},
                         std::ostream* progress = nullptr);

// Draws `count` images from the generator; values lie in [0,1].
std::vector<data::ImageReal> generate_images(nn::ModelGraph& generator, int count, uint64_t seed);

// Tiles up to grid*grid generated images into one 8-bit image.
data::ImageBuffer sample_grid(nn::ModelGraph& generator, int grid, uint64_t seed);

}  // namespace acdl::train
