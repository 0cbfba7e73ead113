#include "train/gan.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <numeric>
#include <ostream>

#include "data/ppm.hpp"
#include "nn/losses.hpp"

namespace acdl::train {

TensorF sample_latent(const LatentSpec& spec, int b, RandomSource& rng) {
    if (b < 1) throw ValueError("sample_latent: batch must be >= 1");
    if (spec.stddev <= 0.0) throw ValueError("sample_latent: stddev must be positive");
    std::vector<float> v(static_cast<size_t>(b) * spec.dim);
    for (float& x : v) x = static_cast<float>(rng.normal(spec.mean, spec.stddev));
    return TensorF::from_data({b, spec.dim}, std::move(v));
}

namespace {

double fraction_ge(std::span<const float> scores, float threshold) {
    int64_t hits = 0;
    for (const float s : scores) hits += s >= threshold ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(scores.size());
}

TensorF as_vector(const TensorF& scores) {
    return reshape(scores, {scores.dim(0)});
}

std::vector<std::vector<float>> trainable_snapshot(nn::ModelGraph& m) {
    std::vector<std::vector<float>> out;
    for (const nn::Param<float>* p : m.trainable_params()) {
        const auto v = p->value.values();
        out.emplace_back(v.begin(), v.end());
    }
    return out;
}

void assert_unchanged(nn::ModelGraph& m, const std::vector<std::vector<float>>& before,
                      const char* what) {
    const auto now = trainable_snapshot(m);
    for (size_t i = 0; i < before.size(); ++i) {
        if (std::memcmp(before[i].data(), now[i].data(), before[i].size() * sizeof(float)) != 0) {
            throw Error(std::string("freeze contract violated: ") + what);
        }
    }
}

}  // namespace

GanStepStats gan_epoch(nn::ModelGraph& generator, nn::ModelGraph& discriminator,
                       const TensorF& real_batch, const GanTrainConfig& config,
                       nn::Adam<float>& gen_opt, nn::Adam<float>& disc_opt, RandomSource& rng) {
    const int b = real_batch.dim(0);
    if (b < 2) throw ValueError("gan_epoch: batch must be >= 2");
    GanStepStats stats;
    nn::ForwardCtx train_ctx{true, &rng};

    // Discriminator update: b real (label 1) + b fake (label 0). The fake
    // batch is detached so nothing reaches the generator.
    std::vector<std::vector<float>> gen_before;
    if (config.verify_freeze) gen_before = trainable_snapshot(generator);
    generator.zero_grad();
    discriminator.zero_grad();
    TensorF fake = generator.forward(sample_latent(config.latent, b, rng), train_ctx).detach();
    TensorF d_real = as_vector(discriminator.forward(real_batch, train_ctx));
    TensorF d_fake = as_vector(discriminator.forward(fake, train_ctx));
    TensorF d_loss = config.loss == GanLoss::lsgan ? nn::lsgan_d_loss(d_real, d_fake)
                                                   : nn::gan_bce_d_loss(d_real, d_fake);
    d_loss.backward();
    disc_opt.step(discriminator.trainable_params());
    stats.d_loss = d_loss.item();
    stats.d_acc_real = fraction_ge(d_real.values(), 0.5f);
    stats.d_acc_fake = 1.0 - fraction_ge(d_fake.values(), 0.5f);
    if (config.verify_freeze) {
        assert_unchanged(generator, gen_before, "discriminator step changed the generator");
    }

    // Generator update on fresh latents, all labelled real, with the
    // discriminator frozen.
    std::vector<std::vector<float>> disc_before;
    if (config.verify_freeze) disc_before = trainable_snapshot(discriminator);
    generator.zero_grad();
    discriminator.zero_grad();
    discriminator.set_trainable(false);
    TensorF fake2 = generator.forward(sample_latent(config.latent, b, rng), train_ctx);
    TensorF d_fake2 = as_vector(discriminator.forward(fake2, train_ctx));
    TensorF g_loss = config.loss == GanLoss::lsgan ? nn::lsgan_g_loss(d_fake2)
                                                   : nn::gan_bce_g_loss(d_fake2);
    g_loss.backward();
    gen_opt.step(generator.trainable_params());
    discriminator.set_trainable(true);
    stats.g_loss = g_loss.item();
    if (config.verify_freeze) {
        assert_unchanged(discriminator, disc_before, "generator step changed the discriminator");
    }
    return stats;
}

GanTrainResult train_gan(nn::ModelGraph& generator, nn::ModelGraph& discriminator,
                         const TensorF& real_images, const GanTrainConfig& config,
                         const std::filesystem::path& sample_dir, std::ostream* progress) {
    if (config.batch_size < 2) throw ValueError("train_gan: batch size must be >= 2");
    if (config.report_interval < 1 || config.save_interval < 1) {
        throw ValueError("train_gan: intervals must be >= 1");
    }
    const int n = real_images.dim(0);
    if (n < config.batch_size) {
        throw ValueError("train_gan: dataset smaller than one batch (" + std::to_string(n) + " < " +
                         std::to_string(config.batch_size) + ")");
    }
    if (!sample_dir.empty()) std::filesystem::create_directories(sample_dir);

    RandomSource rng = RandomSource(config.seed).fork(21);
    nn::AdamHyper hyper{config.lr, config.beta1, config.beta2, config.eps};
    nn::Adam<float> gen_opt(hyper), disc_opt(hyper);
    GanTrainResult result;
    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    const int64_t row = real_images.size() / n;
    const auto all = real_images.values();

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        rng.shuffle(order);
        GanStepStats epoch_stats;
        int batches = 0;
        for (int at = 0; at + config.batch_size <= n; at += config.batch_size) {
            std::vector<float> data(static_cast<size_t>(config.batch_size) * row);
            for (int i = 0; i < config.batch_size; ++i) {
                std::copy(all.begin() + order[static_cast<size_t>(at + i)] * row,
                          all.begin() + (order[static_cast<size_t>(at + i)] + 1) * row,
                          data.begin() + static_cast<int64_t>(i) * row);
            }
            Shape s = real_images.shape();
            s[0] = config.batch_size;
            TensorF batch = TensorF::from_data(std::move(s), std::move(data));
            GanStepStats st;
            try {
                st = gan_epoch(generator, discriminator, batch, config, gen_opt, disc_opt, rng);
            } catch (const NumericError& e) {
                throw Error("gan training diverged at epoch " + std::to_string(epoch) + ": " +
                            e.what());
            }
            epoch_stats.d_loss += st.d_loss;
            epoch_stats.g_loss += st.g_loss;
            epoch_stats.d_acc_real += st.d_acc_real;
            epoch_stats.d_acc_fake += st.d_acc_fake;
            ++batches;
            ++result.steps;
        }
        epoch_stats.d_loss /= batches;
        epoch_stats.g_loss /= batches;
        epoch_stats.d_acc_real /= batches;
        epoch_stats.d_acc_fake /= batches;
        result.per_epoch.push_back(epoch_stats);

        if (progress && epoch % config.report_interval == 0) {
            char line[128];
            std::snprintf(line, sizeof(line), "epoch=%d l_d=%.6f l_g=%.6f d_acc=%.6f\n", epoch,
                          epoch_stats.d_loss, epoch_stats.g_loss, epoch_stats.d_acc());
            (*progress) << line << std::flush;
        }
        if (!sample_dir.empty() && epoch % config.save_interval == 0) {
            data::write_ppm(sample_dir / ("epoch_" + std::to_string(epoch) + ".ppm"),
                            sample_grid(generator, 8, config.seed + static_cast<uint64_t>(epoch)));
        }
    }
    return result;
}

std::vector<data::ImageReal> generate_images(nn::ModelGraph& generator, int count, uint64_t seed) {
    if (count < 0) throw ValueError("generate_images: count must be >= 0");
    std::vector<data::ImageReal> out;
    if (count == 0) return out;
    if (generator.tag() != nn::ArchTag::gan_generator) {
        throw ValueError("generate_images: model is not a generator");
    }
    RandomSource rng = RandomSource(seed).fork(22);
    LatentSpec latent;
    latent.dim = generator.descriptor().latent_dim;
    nn::ForwardCtx ctx;  // eval mode: batch norm uses running statistics
    TensorF imgs = generator.forward(sample_latent(latent, count, rng), ctx);
    const int h = imgs.dim(1), w = imgs.dim(2);
    const int64_t row = static_cast<int64_t>(h) * w * imgs.dim(3);
    const auto v = imgs.values();
    out.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) {
        data::ImageReal img;
        img.height = h;
        img.width = w;
        img.provenance = data::Provenance::synthetic;
        img.pixels.assign(v.begin() + i * row, v.begin() + (i + 1) * row);
        out.push_back(std::move(img));
    }
    return out;
}

data::ImageBuffer sample_grid(nn::ModelGraph& generator, int grid, uint64_t seed) {
    const std::vector<data::ImageReal> imgs = generate_images(generator, grid * grid, seed);
    const int h = imgs[0].height, w = imgs[0].width;
    data::ImageReal canvas;
    canvas.height = grid * h;
    canvas.width = grid * w;
    canvas.provenance = data::Provenance::synthetic;
    canvas.pixels.assign(static_cast<size_t>(canvas.height) * canvas.width * 3, 0.f);
    for (int i = 0; i < grid * grid; ++i) {
        const int gy = (i / grid) * h, gx = (i % grid) * w;
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                for (int c = 0; c < 3; ++c) {
                    canvas.pixels[((static_cast<size_t>(gy + y) * canvas.width) + (gx + x)) * 3 + c] =
                        imgs[static_cast<size_t>(i)].pixels[(static_cast<size_t>(y) * w + x) * 3 + c];
                }
            }
        }
    }
    return data::quantize(canvas);
}

}  // namespace acdl::train
