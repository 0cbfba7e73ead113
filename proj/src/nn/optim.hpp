#pragma once

// Adam with bias correction. One instance owns the moment state for one
// model's parameter list; steps are single-writer.

#include <cmath>
#include <vector>

#include "nn/layers.hpp"

namespace acdl::nn {

struct AdamHyper {
    double alpha = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

template <class T>
class Adam {
public:
    explicit Adam(AdamHyper hyper = {}) : hyper_(hyper) {}

    const AdamHyper& hyper() const { return hyper_; }
    int64_t step_count() const { return t_; }

    // One update over `params` using their accumulated gradients. A missing
    // gradient is treated as zero. Parameter order and shapes must match
    // across calls.
    void step(const std::vector<Param<T>*>& params) {
        if (slots_.empty()) {
            slots_.resize(params.size());
            for (size_t i = 0; i < params.size(); ++i) {
                slots_[i].m.assign(static_cast<size_t>(params[i]->value.size()), 0.0);
                slots_[i].v.assign(static_cast<size_t>(params[i]->value.size()), 0.0);
            }
        }
        if (slots_.size() != params.size()) {
            throw ShapeError("adam: parameter list size changed between steps");
        }
        ++t_;
        const double bc1 = 1.0 - std::pow(hyper_.beta1, static_cast<double>(t_));
        const double bc2 = 1.0 - std::pow(hyper_.beta2, static_cast<double>(t_));
        for (size_t i = 0; i < params.size(); ++i) {
            Param<T>& p = *params[i];
            auto& slot = slots_[i];
            if (slot.m.size() != static_cast<size_t>(p.value.size())) {
                throw ShapeError("adam: shape of parameter '" + p.name + "' changed between steps");
            }
            auto theta = p.value.values_mut();
            const bool has_grad = p.value.has_grad();
            const auto g = has_grad ? p.value.grad() : std::span<const T>();
            for (size_t j = 0; j < theta.size(); ++j) {
                const double gj = has_grad ? static_cast<double>(g[j]) : 0.0;
                slot.m[j] = hyper_.beta1 * slot.m[j] + (1.0 - hyper_.beta1) * gj;
                slot.v[j] = hyper_.beta2 * slot.v[j] + (1.0 - hyper_.beta2) * gj * gj;
                const double mhat = slot.m[j] / bc1;
                const double vhat = slot.v[j] / bc2;
                const double next = static_cast<double>(theta[j]) -
                                    hyper_.alpha * mhat / (std::sqrt(vhat) + hyper_.eps);
                if (!std::isfinite(next)) {
                    throw NumericError("adam produced a non-finite value for '" + p.name + "'");
                }
                theta[j] = static_cast<T>(next);
            }
        }
    }

private:
    struct Slot {
        std::vector<double> m, v;
    };
    AdamHyper hyper_;
    std::vector<Slot> slots_;
    int64_t t_ = 0;
};

}  // namespace acdl::nn
