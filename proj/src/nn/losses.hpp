#pragma once

// Binary cross-entropy and the least-squares adversarial losses.

#include <utility>
#include <vector>

#include "core/ops.hpp"

namespace acdl::nn {

inline constexpr double kBceClip = 1e-7;

// -(1/N) sum[y log p + (1-y) log(1-p)] with p clipped to
// [kBceClip, 1-kBceClip]. `labels` are constants in {0,1}; gradients flow
// into `predicted` only (straight-through at the clip boundary).
template <class T>
Tensor<T> bce_loss(const Tensor<T>& predicted, const Tensor<T>& labels) {
    if (predicted.size() != labels.size()) {
        throw ShapeError("bce: " + std::to_string(predicted.size()) + " predictions vs " +
                         std::to_string(labels.size()) + " labels");
    }
    const auto pv = predicted.values();
    const auto yv = labels.values();
    const int64_t n = predicted.size();
    const T lo = static_cast<T>(kBceClip), hi = static_cast<T>(1.0 - kBceClip);
    double acc = 0.0;
    for (int64_t i = 0; i < n; ++i) {
        const T y = yv[static_cast<size_t>(i)];
        if (y != T(0) && y != T(1)) throw ValueError("bce: labels must be 0 or 1");
        const double p = std::clamp(pv[static_cast<size_t>(i)], lo, hi);
        acc += static_cast<double>(y) * std::log(p) + (1.0 - static_cast<double>(y)) * std::log(1.0 - p);
    }
    const T loss = static_cast<T>(-acc / static_cast<double>(n));
    Tensor<T> pc = predicted, yc = labels;
    return detail::finish<T>(
        "bce", {1}, {loss}, predicted.requires_grad(), {predicted, labels},
        [pc, yc, n, lo, hi](const std::vector<T>&, const std::vector<T>& g) mutable {
            const auto pv = pc.values();
            const auto yv = yc.values();
            std::vector<T> dp(static_cast<size_t>(n));
            const double scale = static_cast<double>(g[0]) / static_cast<double>(n);
            for (int64_t i = 0; i < n; ++i) {
                const double p = std::clamp(pv[static_cast<size_t>(i)], lo, hi);
                const double y = static_cast<double>(yv[static_cast<size_t>(i)]);
                dp[static_cast<size_t>(i)] = static_cast<T>(-scale * (y / p - (1.0 - y) / (1.0 - p)));
            }
            pc.accumulate_grad(dp);
        });
}

// l_d = 0.5 * mean((d_real - 1)^2) + 0.5 * mean(d_fake^2)
template <class T>
Tensor<T> lsgan_d_loss(const Tensor<T>& d_real, const Tensor<T>& d_fake) {
    Tensor<T> r = scalar_add(d_real, T(-1));
    Tensor<T> real_term = scalar_mul(mean_all(mul(r, r)), T(0.5));
    Tensor<T> fake_term = scalar_mul(mean_all(mul(d_fake, d_fake)), T(0.5));
    return add(real_term, fake_term);
}

// l_g = mean((d_fake - 1)^2)
template <class T>
Tensor<T> lsgan_g_loss(const Tensor<T>& d_fake) {
    Tensor<T> f = scalar_add(d_fake, T(-1));
    return mean_all(mul(f, f));
}

template <class T>
std::pair<Tensor<T>, Tensor<T>> lsgan_losses(const Tensor<T>& d_real, const Tensor<T>& d_fake) {
    return {lsgan_d_loss(d_real, d_fake), lsgan_g_loss(d_fake)};
}

// Adversarial BCE variants: real labelled 1, fake labelled 0; the generator
// step labels its fakes as real.
template <class T>
Tensor<T> gan_bce_d_loss(const Tensor<T>& d_real, const Tensor<T>& d_fake) {
    Tensor<T> ones = Tensor<T>::full({static_cast<int>(d_real.size())}, T(1));
    Tensor<T> zeros = Tensor<T>::full({static_cast<int>(d_fake.size())}, T(0));
    return scalar_mul(add(bce_loss(d_real, ones), bce_loss(d_fake, zeros)), T(0.5));
}

template <class T>
Tensor<T> gan_bce_g_loss(const Tensor<T>& d_fake) {
    Tensor<T> ones = Tensor<T>::full({static_cast<int>(d_fake.size())}, T(1));
    return bce_loss(d_fake, ones);
}

}  // namespace acdl::nn
