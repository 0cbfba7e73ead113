#pragma once

// Stateful layer primitives. A layer owns its parameters as grad-tracked
// tensors and exposes a forward pass built from the recorded ops, so the
// backward pass comes for free.

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "core/ops.hpp"
#include "core/rng.hpp"
#include "core/tensor.hpp"

namespace acdl::nn {

template <class T>
struct Param {
    std::string name;
    Tensor<T> value;
    bool trainable = true;  // false for running statistics
};

struct ForwardCtx {
    bool training = false;
    RandomSource* rng = nullptr;  // required only for train-mode dropout
};

// One display row, in the style of an architecture summary table.
struct LayerRow {
    std::string kind;
    int units = 0;  // filters / units; 0 when not applicable
    std::string activation = "-";
};

template <class T>
class Layer {
public:
    virtual ~Layer() = default;
    virtual Tensor<T> forward(const Tensor<T>& x, const ForwardCtx& ctx) = 0;
    virtual void collect_params(std::vector<Param<T>*>& out) {}
    virtual std::vector<LayerRow> rows() const = 0;
};

// ---------------------------------------------------------------------------
// Initializers
// ---------------------------------------------------------------------------

template <class T>
Tensor<T> init_uniform(Shape shape, double limit, RandomSource& rng) {
    std::vector<T> v(static_cast<size_t>(numel(shape)));
    for (T& x : v) x = static_cast<T>(rng.uniform(-limit, limit));
    return Tensor<T>::from_data(std::move(shape), std::move(v)).set_requires_grad(true);
}

template <class T>
Tensor<T> init_he_uniform(Shape shape, int fan_in, RandomSource& rng) {
    return init_uniform<T>(std::move(shape), std::sqrt(6.0 / fan_in), rng);
}

template <class T>
Tensor<T> init_glorot_uniform(Shape shape, int fan_in, int fan_out, RandomSource& rng) {
    return init_uniform<T>(std::move(shape), std::sqrt(6.0 / (fan_in + fan_out)), rng);
}

template <class T>
Tensor<T> init_normal(Shape shape, double stddev, RandomSource& rng) {
    std::vector<T> v(static_cast<size_t>(numel(shape)));
    for (T& x : v) x = static_cast<T>(rng.normal(0.0, stddev));
    return Tensor<T>::from_data(std::move(shape), std::move(v)).set_requires_grad(true);
}

template <class T>
Tensor<T> init_zeros_param(Shape shape) {
    Tensor<T> t = Tensor<T>::zeros(std::move(shape));
    t.set_requires_grad(true);
    return t;
}

// ---------------------------------------------------------------------------
// Layers
// ---------------------------------------------------------------------------

// f(xW + b). Accepts [batch, in] or [batch, seq, in].
template <class T>
class DenseLayer : public Layer<T> {
public:
    DenseLayer(std::string name, Tensor<T> w, Tensor<T> b, Act act)
        : act_(act), w_{name + ".w", std::move(w)}, b_{name + ".b", std::move(b)} {}

    static std::unique_ptr<DenseLayer> make(std::string name, int in, int out, Act act,
                                            RandomSource& rng) {
        Tensor<T> w = (act == Act::relu || act == Act::leaky_relu)
                          ? init_he_uniform<T>({in, out}, in, rng)
                          : init_glorot_uniform<T>({in, out}, in, out, rng);
        return std::make_unique<DenseLayer>(std::move(name), std::move(w),
                                            init_zeros_param<T>({out}), act);
    }

    static std::unique_ptr<DenseLayer> make_normal(std::string name, int in, int out, Act act,
                                                   double stddev, RandomSource& rng) {
        return std::make_unique<DenseLayer>(std::move(name), init_normal<T>({in, out}, stddev, rng),
                                            init_zeros_param<T>({out}), act);
    }

    Tensor<T> forward(const Tensor<T>& x, const ForwardCtx&) override {
        if (x.dim(x.rank() - 1) != w_.value.dim(0)) {
            throw ShapeError("dense: input " + shape_str(x.shape()) + " does not match weights " +
                             shape_str(w_.value.shape()));
        }
        Tensor<T> y = x.rank() == 2 ? matmul(x, w_.value) : bmm(x, w_.value);
        return activation(add(y, b_.value), act_);
    }

    void collect_params(std::vector<Param<T>*>& out) override {
        out.push_back(&w_);
        out.push_back(&b_);
    }

    std::vector<LayerRow> rows() const override {
        return {{"Dense", w_.value.dim(1), act_name(act_)}};
    }

    int64_t param_count() const { return w_.value.size() + b_.value.size(); }
    const Tensor<T>& weights() const { return w_.value; }
    const Tensor<T>& bias() const { return b_.value; }
    Act act() const { return act_; }

private:
    Act act_;
    Param<T> w_, b_;
};

// Inverted dropout: train mode keeps each unit with probability 1-rate and
// scales by 1/(1-rate); eval mode is the exact identity.
template <class T>
class DropoutLayer : public Layer<T> {
public:
    explicit DropoutLayer(double rate) : rate_(rate) {
        if (rate < 0.0 || rate >= 1.0) throw ValueError("dropout rate must be in [0, 1)");
    }

    Tensor<T> forward(const Tensor<T>& x, const ForwardCtx& ctx) override {
        if (!ctx.training || rate_ == 0.0) return x;
        if (!ctx.rng) throw ValueError("dropout in training mode needs an RNG");
        const T keep_scale = static_cast<T>(1.0 / (1.0 - rate_));
        std::vector<T> mask(static_cast<size_t>(x.size()));
        for (T& m : mask) m = ctx.rng->bernoulli(1.0 - rate_) ? keep_scale : T(0);
        return mul(x, Tensor<T>::from_data(x.shape(), std::move(mask)));
    }

    std::vector<LayerRow> rows() const override { return {{"Dropout", 0, "-"}}; }

    double rate() const { return rate_; }

private:
    double rate_;
};

template <class T>
class FlattenLayer : public Layer<T> {
public:
    Tensor<T> forward(const Tensor<T>& x, const ForwardCtx&) override { return flatten(x); }
    std::vector<LayerRow> rows() const override { return {{"Flatten", 0, "-"}}; }
};

template <class T>
class ReshapeLayer : public Layer<T> {
public:
    explicit ReshapeLayer(Shape per_sample) : per_sample_(std::move(per_sample)) {}
    Tensor<T> forward(const Tensor<T>& x, const ForwardCtx&) override {
        Shape s = {x.dim(0)};
        s.insert(s.end(), per_sample_.begin(), per_sample_.end());
        return reshape(x, std::move(s));
    }
    std::vector<LayerRow> rows() const override { return {{"Reshape", 0, "-"}}; }

private:
    Shape per_sample_;
};

template <class T>
class ActivationLayer : public Layer<T> {
public:
    explicit ActivationLayer(Act act) : act_(act) {}
    Tensor<T> forward(const Tensor<T>& x, const ForwardCtx&) override {
        return activation(x, act_);
    }
    std::vector<LayerRow> rows() const override {
        return {{"Activation", 0, act_name(act_)}};
    }

private:
    Act act_;
};

// y = scale * x + shift with fixed constants (the generator's tanh -> [0,1]
// remap).
template <class T>
class ScaleShiftLayer : public Layer<T> {
public:
    ScaleShiftLayer(T scale, T shift) : scale_(scale), shift_(shift) {}
    Tensor<T> forward(const Tensor<T>& x, const ForwardCtx&) override {
        return scalar_add(scalar_mul(x, scale_), shift_);
    }
    std::vector<LayerRow> rows() const override { return {{"Rescale", 0, "-"}}; }

private:
    T scale_, shift_;
};

template <class T>
class Conv2dLayer : public Layer<T> {
public:
    Conv2dLayer(std::string name, Tensor<T> kernel, Tensor<T> bias, int stride, int pad, Act act)
        : stride_(stride), pad_(pad), act_(act),
          kernel_{name + ".kernel", std::move(kernel)}, bias_{name + ".bias", std::move(bias)} {}

    static std::unique_ptr<Conv2dLayer> make(std::string name, int kh, int kw, int cin, int cout,
                                             int stride, int pad, Act act, RandomSource& rng) {
        const int fan_in = kh * kw * cin;
        Tensor<T> k = (act == Act::relu || act == Act::leaky_relu)
                          ? init_he_uniform<T>({kh, kw, cin, cout}, fan_in, rng)
                          : init_glorot_uniform<T>({kh, kw, cin, cout}, fan_in, kh * kw * cout, rng);
        return std::make_unique<Conv2dLayer>(std::move(name), std::move(k),
                                             init_zeros_param<T>({cout}), stride, pad, act);
    }

    // DCGAN-style init: N(0, 0.02).
    static std::unique_ptr<Conv2dLayer> make_gan(std::string name, int kh, int kw, int cin,
                                                 int cout, int stride, int pad, Act act,
                                                 RandomSource& rng) {
        return std::make_unique<Conv2dLayer>(std::move(name),
                                             init_normal<T>({kh, kw, cin, cout}, 0.02, rng),
                                             init_zeros_param<T>({cout}), stride, pad, act);
    }

    Tensor<T> forward(const Tensor<T>& x, const ForwardCtx&) override {
        return activation(conv2d(x, kernel_.value, bias_.value, stride_, pad_), act_);
    }

    void collect_params(std::vector<Param<T>*>& out) override {
        out.push_back(&kernel_);
        out.push_back(&bias_);
    }

    std::vector<LayerRow> rows() const override {
        return {{"Conv2D", kernel_.value.dim(3), act_name(act_)}};
    }

private:
    int stride_, pad_;
    Act act_;
    Param<T> kernel_, bias_;
};

template <class T>
class TransposedConv2dLayer : public Layer<T> {
public:
    TransposedConv2dLayer(std::string name, Tensor<T> kernel, int stride, int pad)
        : stride_(stride), pad_(pad), kernel_{name + ".kernel", std::move(kernel)} {}

    static std::unique_ptr<TransposedConv2dLayer> make_gan(std::string name, int kh, int kw,
                                                           int cout, int cin, int stride, int pad,
                                                           RandomSource& rng) {
        return std::make_unique<TransposedConv2dLayer>(
            std::move(name), init_normal<T>({kh, kw, cout, cin}, 0.02, rng), stride, pad);
    }

    Tensor<T> forward(const Tensor<T>& x, const ForwardCtx&) override {
        return conv2d_transpose(x, kernel_.value, stride_, pad_);
    }

    void collect_params(std::vector<Param<T>*>& out) override { out.push_back(&kernel_); }

    std::vector<LayerRow> rows() const override {
        return {{"Conv2DTranspose", kernel_.value.dim(2), "-"}};
    }

private:
    int stride_, pad_;
    Param<T> kernel_;
};

template <class T>
class MaxPool2dLayer : public Layer<T> {
public:
    Tensor<T> forward(const Tensor<T>& x, const ForwardCtx&) override { return maxpool2d(x); }
    std::vector<LayerRow> rows() const override { return {{"MaxPooling2D", 0, "-"}}; }
};

template <class T>
class PatchExtractLayer : public Layer<T> {
public:
    explicit PatchExtractLayer(int patch) : patch_(patch) {}
    Tensor<T> forward(const Tensor<T>& x, const ForwardCtx&) override {
        return extract_patches(x, patch_);
    }
    std::vector<LayerRow> rows() const override { return {{"Patch Extractor", 0, "-"}}; }
    int patch() const { return patch_; }

private:
    int patch_;
};

template <class T>
class GlobalAvgPoolLayer : public Layer<T> {
public:
    Tensor<T> forward(const Tensor<T>& x, const ForwardCtx&) override { return mean_axis1(x); }
    std::vector<LayerRow> rows() const override {
        return {{"Global Average Pooling1D", 0, "-"}};
    }
};

template <class T>
class LayerNormLayer : public Layer<T> {
public:
    LayerNormLayer(std::string name, int dim, T eps = static_cast<T>(1e-5))
        : eps_(eps),
          gamma_{name + ".gamma", Tensor<T>::full({dim}, T(1)).set_requires_grad(true)},
          beta_{name + ".beta", init_zeros_param<T>({dim})} {}

    Tensor<T> forward(const Tensor<T>& x, const ForwardCtx&) override {
        return layer_norm(x, gamma_.value, beta_.value, eps_);
    }

    void collect_params(std::vector<Param<T>*>& out) override {
        out.push_back(&gamma_);
        out.push_back(&beta_);
    }

    std::vector<LayerRow> rows() const override { return {{"Layer Normalization", 0, "-"}}; }

private:
    T eps_;
    Param<T> gamma_, beta_;
};

// Batch normalization over [N,H,W,C]. Training uses batch statistics and
// maintains running estimates (momentum 0.9); eval uses the running values.
template <class T>
class BatchNormLayer : public Layer<T> {
public:
    BatchNormLayer(std::string name, int channels, T eps = static_cast<T>(1e-5),
                   double momentum = 0.9)
        : eps_(eps), momentum_(momentum),
          gamma_{name + ".gamma", Tensor<T>::full({channels}, T(1)).set_requires_grad(true)},
          beta_{name + ".beta", init_zeros_param<T>({channels})},
          running_mean_{name + ".running_mean", Tensor<T>::zeros({channels}), false},
          running_var_{name + ".running_var", Tensor<T>::full({channels}, T(1)), false} {}

    Tensor<T> forward(const Tensor<T>& x, const ForwardCtx& ctx) override {
        if (!ctx.training) {
            const auto rm = running_mean_.value.values();
            const auto rv = running_var_.value.values();
            return batch_norm_eval(x, gamma_.value, beta_.value,
                                   std::vector<T>(rm.begin(), rm.end()),
                                   std::vector<T>(rv.begin(), rv.end()), eps_);
        }
        std::vector<T> mean, var;
        Tensor<T> y = batch_norm_train(x, gamma_.value, beta_.value, eps_, &mean, &var);
        auto rm = running_mean_.value.values_mut();
        auto rv = running_var_.value.values_mut();
        for (size_t c = 0; c < mean.size(); ++c) {
            rm[c] = static_cast<T>(momentum_ * rm[c] + (1.0 - momentum_) * mean[c]);
            rv[c] = static_cast<T>(momentum_ * rv[c] + (1.0 - momentum_) * var[c]);
        }
        return y;
    }

    void collect_params(std::vector<Param<T>*>& out) override {
        out.push_back(&gamma_);
        out.push_back(&beta_);
        out.push_back(&running_mean_);
        out.push_back(&running_var_);
    }

    std::vector<LayerRow> rows() const override { return {{"BatchNormalization", 0, "-"}}; }

private:
    T eps_;
    double momentum_;
    Param<T> gamma_, beta_, running_mean_, running_var_;
};

// Multi-head self-attention: separate Q/K/V projections per head, softmax
// scaled by 1/sqrt(d_k), heads concatenated, then output-projected.
template <class T>
class MultiHeadAttentionLayer : public Layer<T> {
public:
    MultiHeadAttentionLayer(const std::string& name, int dim, int heads, RandomSource& rng)
        : dim_(dim), heads_(heads) {
        if (heads <= 0 || dim % heads != 0) {
            throw ShapeError("attention: dim " + std::to_string(dim) + " not divisible by " +
                             std::to_string(heads) + " heads");
        }
        dk_ = dim / heads;
        for (int h = 0; h < heads; ++h) {
            const std::string base = name + ".h" + std::to_string(h);
            q_.push_back({base + ".q.w", init_glorot_uniform<T>({dim, dk_}, dim, dk_, rng)});
            qb_.push_back({base + ".q.b", init_zeros_param<T>({dk_})});
            k_.push_back({base + ".k.w", init_glorot_uniform<T>({dim, dk_}, dim, dk_, rng)});
            kb_.push_back({base + ".k.b", init_zeros_param<T>({dk_})});
            v_.push_back({base + ".v.w", init_glorot_uniform<T>({dim, dk_}, dim, dk_, rng)});
            vb_.push_back({base + ".v.b", init_zeros_param<T>({dk_})});
        }
        out_w_ = {name + ".out.w", init_glorot_uniform<T>({dim, dim}, dim, dim, rng)};
        out_b_ = {name + ".out.b", init_zeros_param<T>({dim})};
    }

    Tensor<T> forward(const Tensor<T>& x, const ForwardCtx&) override {
        if (x.rank() != 3 || x.dim(2) != dim_) {
            throw ShapeError("attention: expected [batch, patches, " + std::to_string(dim_) +
                             "], got " + shape_str(x.shape()));
        }
        std::vector<Tensor<T>> head_outputs;
        head_outputs.reserve(static_cast<size_t>(heads_));
        const T scale = static_cast<T>(1.0 / std::sqrt(static_cast<double>(dk_)));
        for (int h = 0; h < heads_; ++h) {
            Tensor<T> q = add(bmm(x, q_[h].value), qb_[h].value);
            Tensor<T> k = add(bmm(x, k_[h].value), kb_[h].value);
            Tensor<T> v = add(bmm(x, v_[h].value), vb_[h].value);
            Tensor<T> attn = softmax_lastdim(scalar_mul(bmm(q, transpose_last2(k)), scale));
            head_outputs.push_back(bmm(attn, v));
        }
        Tensor<T> merged = heads_ == 1 ? head_outputs[0] : concat_lastdim(head_outputs);
        return add(bmm(merged, out_w_.value), out_b_.value);
    }

    // Attention maps per head (no output projection); used by tests.
    std::vector<Tensor<T>> attention_maps(const Tensor<T>& x) {
        std::vector<Tensor<T>> maps;
        const T scale = static_cast<T>(1.0 / std::sqrt(static_cast<double>(dk_)));
        for (int h = 0; h < heads_; ++h) {
            Tensor<T> q = add(bmm(x.detach(), q_[h].value.detach()), qb_[h].value.detach());
            Tensor<T> k = add(bmm(x.detach(), k_[h].value.detach()), kb_[h].value.detach());
            maps.push_back(softmax_lastdim(scalar_mul(bmm(q, transpose_last2(k)), scale)));
        }
        return maps;
    }

    void collect_params(std::vector<Param<T>*>& out) override {
        for (int h = 0; h < heads_; ++h) {
            out.push_back(&q_[h]);
            out.push_back(&qb_[h]);
            out.push_back(&k_[h]);
            out.push_back(&kb_[h]);
            out.push_back(&v_[h]);
            out.push_back(&vb_[h]);
        }
        out.push_back(&out_w_);
        out.push_back(&out_b_);
    }

    std::vector<LayerRow> rows() const override {
        return {{"MultiHead Attention", dim_, "-"}};
    }

    int heads() const { return heads_; }
    int head_dim() const { return dk_; }
    int64_t param_count() const { return 3LL * heads_ * (static_cast<int64_t>(dim_) * dk_ + dk_) +
                                         static_cast<int64_t>(dim_) * dim_ + dim_; }

private:
    int dim_, heads_, dk_ = 0;
    std::vector<Param<T>> q_, qb_, k_, kb_, v_, vb_;
    Param<T> out_w_, out_b_;
};

// Pre-norm transformer block:
//   h = x + MHA(LN(x));  y = h + Dense2(Dense1(LN(h)))
template <class T>
class TransformerBlockLayer : public Layer<T> {
public:
    TransformerBlockLayer(const std::string& name, int dim, int heads, int mlp_hidden,
                          RandomSource& rng)
        : ln1_(std::make_unique<LayerNormLayer<T>>(name + ".ln1", dim)),
          attn_(std::make_unique<MultiHeadAttentionLayer<T>>(name + ".attn", dim, heads, rng)),
          ln2_(std::make_unique<LayerNormLayer<T>>(name + ".ln2", dim)),
          fc1_(DenseLayer<T>::make(name + ".fc1", dim, mlp_hidden, Act::relu, rng)),
          fc2_(DenseLayer<T>::make(name + ".fc2", mlp_hidden, dim, Act::identity, rng)) {}

    Tensor<T> forward(const Tensor<T>& x, const ForwardCtx& ctx) override {
        Tensor<T> h = add(x, attn_->forward(ln1_->forward(x, ctx), ctx));
        Tensor<T> m = fc2_->forward(fc1_->forward(ln2_->forward(h, ctx), ctx), ctx);
        return add(h, m);
    }

    void collect_params(std::vector<Param<T>*>& out) override {
        ln1_->collect_params(out);
        attn_->collect_params(out);
        ln2_->collect_params(out);
        fc1_->collect_params(out);
        fc2_->collect_params(out);
    }

    std::vector<LayerRow> rows() const override {
        std::vector<LayerRow> r;
        auto push_all = [&r](const std::vector<LayerRow>& rows) {
            r.insert(r.end(), rows.begin(), rows.end());
        };
        push_all(ln1_->rows());
        push_all(attn_->rows());
        r.push_back({"Add", 0, "-"});
        push_all(ln2_->rows());
        push_all(fc1_->rows());
        push_all(fc2_->rows());
        r.push_back({"Add", 0, "-"});
        return r;
    }

    MultiHeadAttentionLayer<T>& attention() { return *attn_; }

private:
    std::unique_ptr<LayerNormLayer<T>> ln1_;
    std::unique_ptr<MultiHeadAttentionLayer<T>> attn_;
    std::unique_ptr<LayerNormLayer<T>> ln2_;
    std::unique_ptr<DenseLayer<T>> fc1_, fc2_;
};

}  // namespace acdl::nn
