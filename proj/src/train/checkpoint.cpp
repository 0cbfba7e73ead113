#include "train/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "json.hpp"

namespace acdl::train {

namespace {

constexpr char kMagic[] = "ACDLCKPT1\n";  // 10 bytes, no terminator written
constexpr size_t kMagicLen = 10;
constexpr int kFormatVersion = 1;

void put_u64_le(std::string& out, uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

uint64_t get_u64_le(const uint8_t* p) {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(p[i]) << (8 * i);
    return v;
}

void put_f32_le(std::string& out, float f) {
    uint32_t bits;
    std::memcpy(&bits, &f, 4);
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

float get_f32_le(const uint8_t* p) {
    uint32_t bits = 0;
    for (int i = 0; i < 4; ++i) bits |= static_cast<uint32_t>(p[i]) << (8 * i);
    float f;
    std::memcpy(&f, &bits, 4);
    return f;
}

nlohmann::json descriptor_to_json(const nn::ArchDescriptor& d) {
    nlohmann::json j;
    j["tag"] = nn::arch_tag_name(d.tag);
    j["input"] = {{"height", d.input.height}, {"width", d.input.width}, {"channels", d.input.channels}};
    if (d.tag == nn::ArchTag::vit) {
        j["patch_size"] = d.patch_size;
        j["projection_dim"] = d.projection_dim;
        j["heads"] = d.heads;
        j["transformer_layers"] = d.transformer_layers;
        j["mlp_hidden"] = d.mlp_hidden;
    }
    if (d.tag == nn::ArchTag::gan_generator) j["latent_dim"] = d.latent_dim;
    return j;
}

nn::ArchDescriptor descriptor_from_json(const nlohmann::json& j) {
    nn::ArchDescriptor d;
    d.tag = nn::arch_tag_from_name(j.at("tag").get<std::string>());
    d.input.height = j.at("input").at("height").get<int>();
    d.input.width = j.at("input").at("width").get<int>();
    d.input.channels = j.at("input").at("channels").get<int>();
    if (d.tag == nn::ArchTag::vit) {
        d.patch_size = j.at("patch_size").get<int>();
        d.projection_dim = j.at("projection_dim").get<int>();
        d.heads = j.at("heads").get<int>();
        d.transformer_layers = j.at("transformer_layers").get<int>();
        d.mlp_hidden = j.at("mlp_hidden").get<int>();
    }
    if (d.tag == nn::ArchTag::gan_generator) d.latent_dim = j.at("latent_dim").get<int>();
    return d;
}

}  // namespace

void save_checkpoint(const nn::ModelGraph& model, const std::filesystem::path& path,
                     const CheckpointMeta& meta) {
    nlohmann::json manifest;
    manifest["format_version"] = kFormatVersion;
    manifest["architecture"] = descriptor_to_json(model.descriptor());
    manifest["metadata"] = {{"seed", meta.seed}, {"epoch", meta.epoch}};
    for (const auto& [k, v] : meta.final_metrics) manifest["metadata"]["final_metrics"][k] = v;

    nlohmann::json params = nlohmann::json::array();
    uint64_t offset = 0;
    for (const nn::Param<float>* p : model.params()) {
        nlohmann::json entry;
        entry["name"] = p->name;
        entry["shape"] = p->value.shape();
        entry["dtype"] = "f32";
        entry["offset"] = offset;
        entry["trainable"] = p->trainable;
        params.push_back(std::move(entry));
        offset += static_cast<uint64_t>(p->value.size()) * 4;
    }
    manifest["params"] = std::move(params);

    const std::string manifest_text = manifest.dump();
    std::string out;
    out.reserve(kMagicLen + 8 + manifest_text.size() + offset);
    out.append(kMagic, kMagicLen);
    put_u64_le(out, manifest_text.size());
    out += manifest_text;
    for (const nn::Param<float>* p : model.params()) {
        for (const float f : p->value.values()) put_f32_le(out, f);
    }

    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot write checkpoint " + path.string());
    file.write(out.data(), static_cast<long>(out.size()));
    if (!file) throw IoError("short write to " + path.string());
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw UsageError("checkpoint not found: " + path.string());
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());

    if (bytes.size() < kMagicLen + 8 || std::memcmp(bytes.data(), kMagic, kMagicLen) != 0) {
        throw FormatError(path.string() + ": bad checkpoint magic");
    }
    const uint64_t manifest_len = get_u64_le(bytes.data() + kMagicLen);
    const size_t payload_at = kMagicLen + 8 + manifest_len;
    if (payload_at > bytes.size()) throw FormatError(path.string() + ": truncated manifest");

    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(bytes.begin() + kMagicLen + 8,
                                         bytes.begin() + static_cast<long>(payload_at));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string() + ": unreadable manifest: " + e.what());
    }
    if (manifest.value("format_version", -1) != kFormatVersion) {
        throw FormatError(path.string() + ": unsupported checkpoint version " +
                          manifest.value("format_version", nlohmann::json()).dump());
    }

    LoadedCheckpoint result{nn::build_from_descriptor(descriptor_from_json(manifest.at("architecture"))),
                            CheckpointMeta{}};
    const auto& meta = manifest.at("metadata");
    result.meta.seed = meta.value("seed", 0ull);
    result.meta.epoch = meta.value("epoch", 0);
    if (meta.contains("final_metrics")) {
        for (const auto& [k, v] : meta.at("final_metrics").items()) {
            result.meta.final_metrics[k] = v.get<double>();
        }
    }

    const auto& entries = manifest.at("params");
    const auto& params = result.model.params();
    if (entries.size() != params.size())
        throw FormatError(path.string() + ": manifest lists " + std::to_string(entries.size()) +
                          " parameters, architecture has " + std::to_string(params.size()));
    uint64_t total_bytes = 0;
    for (const auto& e : entries) total_bytes += static_cast<uint64_t>(numel(e.at("shape").get<Shape>())) * 4;
    if (bytes.size() - payload_at != total_bytes) {
        throw FormatError(path.string() + ": payload is " + std::to_string(bytes.size() - payload_at) +
                          " bytes, manifest expects " + std::to_string(total_bytes));
    }

    for (size_t i = 0; i < params.size(); ++i) {
        const auto& e = entries[i];
        nn::Param<float>* p = params[i];
        if (e.at("name").get<std::string>() != p->name) {
            throw FormatError(path.string() + ": parameter order mismatch at '" +
                              e.at("name").get<std::string>() + "'");
        }
        const Shape shape = e.at("shape").get<Shape>();
        if (shape != p->value.shape()) {
            throw FormatError(path.string() + ": shape mismatch for '" + p->name + "'");
        }
        if (e.at("dtype").get<std::string>() != "f32") {
            throw FormatError(path.string() + ": unsupported dtype for '" + p->name + "'");
        }
        const uint64_t offset = e.at("offset").get<uint64_t>();
        if (payload_at + offset + static_cast<uint64_t>(p->value.size()) * 4 > bytes.size()) {
            throw FormatError(path.string() + ": parameter '" + p->name + "' overruns payload");
        }
        auto dst = p->value.values_mut();
        const uint8_t* src = bytes.data() + payload_at + offset;
        for (size_t j = 0; j < dst.size(); ++j) dst[j] = get_f32_le(src + j * 4);
    }
    return result;
}

}  // namespace acdl::train
