#pragma once

// Architecture builders. Each builder produces a ModelGraph whose layer rows
// match the corresponding summary table row for row.

#include <memory>
#include <string>
#include <vector>

#include "nn/layers.hpp"

namespace acdl::nn {

enum class ArchTag { cnn, ftcnn, vit, gan_generator, gan_discriminator };

const char* arch_tag_name(ArchTag tag);
ArchTag arch_tag_from_name(const std::string& name);

struct InputSpec {
    int height = 224;
    int width = 224;
    int channels = 3;
};

struct VitConfig {
    InputSpec input{224, 224, 3};
    int patch_size = 16;
    int projection_dim = 64;
    int heads = 4;
    int transformer_layers = 8;
    int mlp_hidden = 128;

    void validate() const;
    int num_patches() const { return (input.height / patch_size) * (input.width / patch_size); }
    int patch_dim() const { return patch_size * patch_size * input.channels; }
};

// Everything needed to rebuild a model skeleton before loading parameters.
struct ArchDescriptor {
    ArchTag tag = ArchTag::cnn;
    InputSpec input;       // consumed image (classifiers, discriminator) or
                           // produced image (generator)
    int latent_dim = 0;    // generator only
    // ViT fields
    int patch_size = 0;
    int projection_dim = 0;
    int heads = 0;
    int transformer_layers = 0;
    int mlp_hidden = 0;
};

class ModelGraph {
public:
    ModelGraph(ArchDescriptor desc) : desc_(std::move(desc)) {}
    ModelGraph(ModelGraph&&) = default;
    ModelGraph& operator=(ModelGraph&&) = default;
    ModelGraph(const ModelGraph&) = delete;
    ModelGraph& operator=(const ModelGraph&) = delete;

    void add(std::unique_ptr<Layer<float>> layer);
    void finalize();  // collects the parameter registry, checks name uniqueness

    TensorF forward(const TensorF& x, const ForwardCtx& ctx);

    const ArchDescriptor& descriptor() const { return desc_; }
    ArchTag tag() const { return desc_.tag; }
    const InputSpec& input_spec() const { return desc_.input; }
    bool is_classifier() const {
        return desc_.tag == ArchTag::cnn || desc_.tag == ArchTag::ftcnn || desc_.tag == ArchTag::vit;
    }

    const std::vector<Param<float>*>& params() const { return params_; }
    std::vector<Param<float>*> trainable_params() const;
    Param<float>* find_param(const std::string& name) const;
    int64_t param_count(bool trainable_only = true) const;

    void zero_grad();
    void set_trainable(bool requires_grad);  // freeze / unfreeze

    std::vector<std::vector<float>> snapshot() const;
    void restore(const std::vector<std::vector<float>>& snap);

    std::vector<LayerRow> rows() const;
    std::string summary() const;

    std::vector<std::unique_ptr<Layer<float>>>& layers() { return layers_; }

private:
    ArchDescriptor desc_;
    std::vector<std::unique_ptr<Layer<float>>> layers_;
    std::vector<Param<float>*> params_;
};

ModelGraph build_cnn(const InputSpec& input, uint64_t seed);
ModelGraph build_ftcnn(const InputSpec& input, uint64_t seed);
ModelGraph build_vit(const VitConfig& config, uint64_t seed);

struct GanPair {
    ModelGraph generator;
    ModelGraph discriminator;
};
GanPair build_dcgan(int latent_dim, const InputSpec& image, uint64_t seed);

ModelGraph build_from_descriptor(const ArchDescriptor& desc, uint64_t seed = 0);

// Closed-form trainable parameter count for a ViT config.
int64_t vit_param_count(const VitConfig& config);

struct Predictions {
    std::vector<float> scores;
    std::vector<int> labels;  // 1 iff score >= 0.5
};

// Eval-mode scoring of a classifier batch.
Predictions predict(ModelGraph& model, const TensorF& batch);

}  // namespace acdl::nn
