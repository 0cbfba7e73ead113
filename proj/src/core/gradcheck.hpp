#pragma once

// Finite-difference verification harness. Runs in 64-bit: central differences
// with h = 1e-4 are unreliable at float precision.

#include <cstdint>
#include <functional>
#include <vector>

#include "core/ops.hpp"
#include "core/rng.hpp"
#include "core/tensor.hpp"

namespace acdl {

struct GradCheckReport {
    double max_rel_error = 0.0;
    int64_t worst_index = -1;
    double reverse_value = 0.0;
    double fd_value = 0.0;
    double tol = 0.0;
    bool passed = false;
};

// Compares reverse-mode gradients of fn at `input` against central finite
// differences. The (possibly non-scalar) output is reduced to a scalar via a
// fixed random weighting so every output element contributes.
inline GradCheckReport grad_check(const std::function<TensorD(const TensorD&)>& fn,
                                  const TensorD& input, double tol, double h = 1e-4) {
    // Fixed weights: deterministic, sign-mixed so cancellations cannot hide.
    TensorD probe = fn(input.detach());
    RandomSource wrng(0x9dc5f1a3u);
    std::vector<double> w(static_cast<size_t>(probe.size()));
    for (double& v : w) v = wrng.uniform(0.25, 1.0) * (wrng.bernoulli(0.5) ? 1.0 : -1.0);
    const TensorD weights = TensorD::from_data(probe.shape(), w);

    auto objective = [&](const TensorD& x) { return sum_all(mul(fn(x), weights)); };

    TensorD x = input.detach();
    x.set_requires_grad(true);
    TensorD loss = objective(x);
    loss.backward();
    const auto rev = x.grad();

    GradCheckReport report;
    report.tol = tol;
    TensorD xfd = input.detach();
    auto xv = xfd.values_mut();
    for (int64_t i = 0; i < xfd.size(); ++i) {
        const double orig = xv[static_cast<size_t>(i)];
        xv[static_cast<size_t>(i)] = orig + h;
        const double plus = objective(xfd).item();
        xv[static_cast<size_t>(i)] = orig - h;
        const double minus = objective(xfd).item();
        xv[static_cast<size_t>(i)] = orig;
        const double fd = (plus - minus) / (2.0 * h);
        const double rv = rev[static_cast<size_t>(i)];
        const double rel = std::abs(rv - fd) / std::max(std::abs(rv) + std::abs(fd), 1e-6);
        if (rel > report.max_rel_error) {
            report.max_rel_error = rel;
            report.worst_index = i;
            report.reverse_value = rv;
            report.fd_value = fd;
        }
    }
    report.passed = report.max_rel_error <= tol;
    return report;
}

}  // namespace acdl
