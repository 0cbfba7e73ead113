#include "nn/models.hpp"

#include <sstream>
#include <unordered_set>

namespace acdl::nn {

const char* arch_tag_name(ArchTag tag) {
    switch (tag) {
        case ArchTag::cnn: return "cnn";
        case ArchTag::ftcnn: return "ftcnn";
        case ArchTag::vit: return "vit";
        case ArchTag::gan_generator: return "gan_generator";
        case ArchTag::gan_discriminator: return "gan_discriminator";
    }
    return "?";
}

ArchTag arch_tag_from_name(const std::string& name) {
    if (name == "cnn") return ArchTag::cnn;
    if (name == "ftcnn") return ArchTag::ftcnn;
    if (name == "vit") return ArchTag::vit;
    if (name == "gan_generator") return ArchTag::gan_generator;
    if (name == "gan_discriminator") return ArchTag::gan_discriminator;
    throw ValueError("unknown architecture tag '" + name + "'");
}

void VitConfig::validate() const {
    if (patch_size <= 0 || input.height % patch_size != 0 || input.width % patch_size != 0) {
        throw ShapeError("vit: patch size " + std::to_string(patch_size) +
                         " must divide input extents " + std::to_string(input.height) + "x" +
                         std::to_string(input.width));
    }
    if (heads <= 0 || projection_dim % heads != 0) {
        throw ShapeError("vit: projection_dim " + std::to_string(projection_dim) +
                         " must be divisible by heads " + std::to_string(heads));
    }
    if (transformer_layers < 0) throw ValueError("vit: transformer_layers must be >= 0");
    if (mlp_hidden <= 0) throw ValueError("vit: mlp_hidden must be positive");
}

void ModelGraph::add(std::unique_ptr<Layer<float>> layer) { layers_.push_back(std::move(layer)); }

void ModelGraph::finalize() {
    params_.clear();
    for (auto& layer : layers_) layer->collect_params(params_);
    std::unordered_set<std::string> seen;
    for (const Param<float>* p : params_) {
        if (!seen.insert(p->name).second) {
            throw ValueError("duplicate parameter name '" + p->name + "'");
        }
    }
}

TensorF ModelGraph::forward(const TensorF& x, const ForwardCtx& ctx) {
    TensorF h = x;
    for (auto& layer : layers_) h = layer->forward(h, ctx);
    return h;
}

std::vector<Param<float>*> ModelGraph::trainable_params() const {
    std::vector<Param<float>*> out;
    for (Param<float>* p : params_)
        if (p->trainable) out.push_back(p);
    return out;
}

Param<float>* ModelGraph::find_param(const std::string& name) const {
    for (Param<float>* p : params_)
        if (p->name == name) return p;
    return nullptr;
}

int64_t ModelGraph::param_count(bool trainable_only) const {
    int64_t n = 0;
    for (const Param<float>* p : params_)
        if (!trainable_only || p->trainable) n += p->value.size();
    return n;
}

void ModelGraph::zero_grad() {
    for (Param<float>* p : params_) p->value.zero_grad();
}

void ModelGraph::set_trainable(bool requires_grad) {
    for (Param<float>* p : params_)
        if (p->trainable) p->value.set_requires_grad(requires_grad);
}

std::vector<std::vector<float>> ModelGraph::snapshot() const {
    std::vector<std::vector<float>> snap;
    snap.reserve(params_.size());
    for (const Param<float>* p : params_) {
        const auto v = p->value.values();
        snap.emplace_back(v.begin(), v.end());
    }
    return snap;
}

void ModelGraph::restore(const std::vector<std::vector<float>>& snap) {
    if (snap.size() != params_.size()) throw ShapeError("snapshot does not match parameter list");
    for (size_t i = 0; i < snap.size(); ++i) {
        auto dst = params_[i]->value.values_mut();
        if (snap[i].size() != dst.size()) throw ShapeError("snapshot shape mismatch");
        std::copy(snap[i].begin(), snap[i].end(), dst.begin());
    }
}

std::vector<LayerRow> ModelGraph::rows() const {
    std::vector<LayerRow> out;
    for (const auto& layer : layers_) {
        auto r = layer->rows();
        out.insert(out.end(), r.begin(), r.end());
    }
    return out;
}

std::string ModelGraph::summary() const {
    std::ostringstream os;
    os << arch_tag_name(desc_.tag) << " (" << desc_.input.height << "x" << desc_.input.width << "x"
       << desc_.input.channels << ")\n";
    for (const LayerRow& r : rows()) {
        os << "  " << r.kind;
        if (r.units > 0) os << " " << r.units;
        if (r.activation != "-") os << " [" << r.activation << "]";
        os << "\n";
    }
    os << "  trainable parameters: " << param_count(true) << "\n";
    return os.str();
}

namespace {

// Spatial extent chain for valid 3x3 convs followed by 2x2 pools.
void check_conv_stack(const InputSpec& input, int stages, const char* what) {
    int h = input.height, w = input.width;
    for (int s = 0; s < stages; ++s) {
        if (h < 3 || w < 3) {
            throw ShapeError(std::string(what) + ": input " + std::to_string(input.height) + "x" +
                             std::to_string(input.width) + " collapses at conv stage " +
                             std::to_string(s + 1));
        }
        h -= 2;
        w -= 2;
        if (h < 2 || w < 2) {
            throw ShapeError(std::string(what) + ": input " + std::to_string(input.height) + "x" +
                             std::to_string(input.width) + " collapses at pool stage " +
                             std::to_string(s + 1));
        }
        h /= 2;
        w /= 2;
    }
}

int after_stages(int extent, int stages) {
    for (int s = 0; s < stages; ++s) extent = (extent - 2) / 2;
    return extent;
}

}  // namespace

ModelGraph build_cnn(const InputSpec& input, uint64_t seed) {
    check_conv_stack(input, 3, "cnn");
    RandomSource rng = RandomSource(seed).fork(1);
    ArchDescriptor desc;
    desc.tag = ArchTag::cnn;
    desc.input = input;
    ModelGraph m(desc);
    const int filters[3] = {32, 64, 128};
    int cin = input.channels;
    for (int s = 0; s < 3; ++s) {
        m.add(Conv2dLayer<float>::make("conv" + std::to_string(s + 1), 3, 3, cin, filters[s], 1, 0,
                                       Act::relu, rng));
        m.add(std::make_unique<MaxPool2dLayer<float>>());
        cin = filters[s];
    }
    m.add(std::make_unique<FlattenLayer<float>>());
    const int flat = after_stages(input.height, 3) * after_stages(input.width, 3) * 128;
    m.add(DenseLayer<float>::make("dense1", flat, 256, Act::relu, rng));
    m.add(DenseLayer<float>::make("out", 256, 1, Act::sigmoid, rng));
    m.finalize();
    return m;
}

ModelGraph build_ftcnn(const InputSpec& input, uint64_t seed) {
    check_conv_stack(input, 4, "ftcnn");
    RandomSource rng = RandomSource(seed).fork(2);
    ArchDescriptor desc;
    desc.tag = ArchTag::ftcnn;
    desc.input = input;
    ModelGraph m(desc);
    const int filters[4] = {32, 64, 128, 256};
    int cin = input.channels;
    for (int s = 0; s < 4; ++s) {
        m.add(Conv2dLayer<float>::make("conv" + std::to_string(s + 1), 3, 3, cin, filters[s], 1, 0,
                                       Act::relu, rng));
        m.add(std::make_unique<MaxPool2dLayer<float>>());
        cin = filters[s];
    }
    m.add(std::make_unique<FlattenLayer<float>>());
    const int flat = after_stages(input.height, 4) * after_stages(input.width, 4) * 256;
    m.add(DenseLayer<float>::make("dense1", flat, 512, Act::relu, rng));
    m.add(std::make_unique<DropoutLayer<float>>(0.5));
    m.add(DenseLayer<float>::make("out", 512, 1, Act::sigmoid, rng));
    m.finalize();
    return m;
}

ModelGraph build_vit(const VitConfig& config, uint64_t seed) {
    config.validate();
    RandomSource rng = RandomSource(seed).fork(3);
    ArchDescriptor desc;
    desc.tag = ArchTag::vit;
    desc.input = config.input;
    desc.patch_size = config.patch_size;
    desc.projection_dim = config.projection_dim;
    desc.heads = config.heads;
    desc.transformer_layers = config.transformer_layers;
    desc.mlp_hidden = config.mlp_hidden;
    ModelGraph m(desc);
    m.add(std::make_unique<PatchExtractLayer<float>>(config.patch_size));
    m.add(DenseLayer<float>::make("patch_proj", config.patch_dim(), config.projection_dim,
                                  Act::identity, rng));
    for (int b = 0; b < config.transformer_layers; ++b) {
        m.add(std::make_unique<TransformerBlockLayer<float>>("block" + std::to_string(b),
                                                             config.projection_dim, config.heads,
                                                             config.mlp_hidden, rng));
    }
    m.add(std::make_unique<LayerNormLayer<float>>("final_ln", config.projection_dim));
    m.add(std::make_unique<GlobalAvgPoolLayer<float>>());
    m.add(DenseLayer<float>::make("head", config.projection_dim, 1, Act::sigmoid, rng));
    m.finalize();
    return m;
}

int64_t vit_param_count(const VitConfig& c) {
    const int64_t d = c.projection_dim;
    const int64_t dk = d / c.heads;
    const int64_t patch_proj = d * c.patch_dim() + d;
    const int64_t ln = 2 * d;
    const int64_t mha = 3LL * c.heads * (d * dk + dk) + d * d + d;
    const int64_t mlp = (d * c.mlp_hidden + c.mlp_hidden) + (c.mlp_hidden * d + d);
    const int64_t head = d + 1;
    return patch_proj + c.transformer_layers * (ln + mha + ln + mlp) + ln + head;
}

namespace {

void check_gan_image(const InputSpec& image) {
    if (image.height != image.width || image.height < 16 || image.height % 8 != 0) {
        throw ShapeError("dcgan: unsupported image size " + std::to_string(image.height) + "x" +
                         std::to_string(image.width) + " (need square, >= 16, divisible by 8)");
    }
}

}  // namespace

GanPair build_dcgan(int latent_dim, const InputSpec& image, uint64_t seed) {
    check_gan_image(image);
    if (latent_dim <= 0) throw ValueError("dcgan: latent dimension must be positive");

    // Generator: project the latent to an (H/8 x W/8 x 256) map, then three
    // stride-2 transposed-conv stages (channels 128 -> 64 -> 32, each with
    // batch norm + ReLU) double the extent to H, and a stride-1 transposed
    // conv maps to the output channels; tanh rescaled into [0,1].
    RandomSource grng = RandomSource(seed).fork(4);
    ArchDescriptor gdesc;
    gdesc.tag = ArchTag::gan_generator;
    gdesc.input = image;
    gdesc.latent_dim = latent_dim;
    ModelGraph gen(gdesc);
    const int s0 = image.height / 8;
    gen.add(DenseLayer<float>::make_normal("project", latent_dim, s0 * s0 * 256, Act::identity,
                                           0.02, grng));
    gen.add(std::make_unique<ReshapeLayer<float>>(Shape{s0, s0, 256}));
    const int up_channels[3] = {128, 64, 32};
    int cin = 256;
    for (int s = 0; s < 3; ++s) {
        gen.add(TransposedConv2dLayer<float>::make_gan("up" + std::to_string(s + 1), 4, 4,
                                                       up_channels[s], cin, 2, 1, grng));
        gen.add(std::make_unique<BatchNormLayer<float>>("bn" + std::to_string(s + 1),
                                                        up_channels[s]));
        gen.add(std::make_unique<ActivationLayer<float>>(Act::relu));
        cin = up_channels[s];
    }
    gen.add(TransposedConv2dLayer<float>::make_gan("to_rgb", 3, 3, image.channels, cin, 1, 1, grng));
    gen.add(std::make_unique<ActivationLayer<float>>(Act::tanh));
    gen.add(std::make_unique<ScaleShiftLayer<float>>(0.5f, 0.5f));
    gen.finalize();

    // Discriminator: four stride-2 convs with LeakyReLU, then a sigmoid head.
    RandomSource drng = RandomSource(seed).fork(5);
    ArchDescriptor ddesc;
    ddesc.tag = ArchTag::gan_discriminator;
    ddesc.input = image;
    ModelGraph disc(ddesc);
    const int down_channels[4] = {32, 64, 128, 256};
    int h = image.height, w = image.width;
    cin = image.channels;
    for (int s = 0; s < 4; ++s) {
        disc.add(Conv2dLayer<float>::make_gan("conv" + std::to_string(s + 1), 4, 4, cin,
                                              down_channels[s], 2, 1, Act::leaky_relu, drng));
        h = (h + 2 - 4) / 2 + 1;
        w = (w + 2 - 4) / 2 + 1;
        cin = down_channels[s];
    }
    disc.add(std::make_unique<FlattenLayer<float>>());
    disc.add(DenseLayer<float>::make_normal("out", h * w * 256, 1, Act::sigmoid, 0.02, drng));
    disc.finalize();

    return GanPair{std::move(gen), std::move(disc)};
}

ModelGraph build_from_descriptor(const ArchDescriptor& desc, uint64_t seed) {
    switch (desc.tag) {
        case ArchTag::cnn: return build_cnn(desc.input, seed);
        case ArchTag::ftcnn: return build_ftcnn(desc.input, seed);
        case ArchTag::vit: {
            VitConfig cfg;
            cfg.input = desc.input;
            cfg.patch_size = desc.patch_size;
            cfg.projection_dim = desc.projection_dim;
            cfg.heads = desc.heads;
            cfg.transformer_layers = desc.transformer_layers;
            cfg.mlp_hidden = desc.mlp_hidden;
            return build_vit(cfg, seed);
        }
        case ArchTag::gan_generator:
            return std::move(build_dcgan(desc.latent_dim, desc.input, seed).generator);
        case ArchTag::gan_discriminator:
            return std::move(build_dcgan(desc.latent_dim > 0 ? desc.latent_dim : 100, desc.input, seed)
                                 .discriminator);
    }
    throw ValueError("unknown architecture tag");
}

Predictions predict(ModelGraph& model, const TensorF& batch) {
    if (!model.is_classifier()) {
        throw ValueError(std::string("predict: '") + arch_tag_name(model.tag()) +
                         "' is not a classifier");
    }
    ForwardCtx ctx;  // eval mode
    TensorF out = model.forward(batch, ctx);
    Predictions p;
    const auto v = out.values();
    p.scores.assign(v.begin(), v.end());
    p.labels.reserve(p.scores.size());
    for (float s : p.scores) p.labels.push_back(s >= 0.5f ? 1 : 0);
    return p;
}

}  // namespace acdl::nn
