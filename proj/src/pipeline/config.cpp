#include "pipeline/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace acdl::pipeline {

namespace {

struct KeyInfo {
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, const std::string&)> set;
};

int parse_int(const std::string& key, const std::string& v) {
    int out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) {
        throw UsageError("config: key '" + key + "' expects an integer, got '" + v + "'");
    }
    return out;
}

uint64_t parse_u64(const std::string& key, const std::string& v) {
    uint64_t out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) {
        throw UsageError("config: key '" + key + "' expects an unsigned integer, got '" + v + "'");
    }
    return out;
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        size_t used = 0;
        const double out = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw UsageError("config: key '" + key + "' expects a number, got '" + v + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw UsageError("config: key '" + key + "' expects true/false, got '" + v + "'");
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

std::string double_str(double d) {
    std::ostringstream os;
    os.precision(17);
    os << d;
    return os.str();
}

const std::map<std::string, KeyInfo>& key_table() {
    static const std::map<std::string, KeyInfo> table = [] {
        std::map<std::string, KeyInfo> t;
        auto str_key = [&t](const std::string& k, std::string RunConfig::* field) {
            t[k] = {[field](const RunConfig& c) { return c.*field; },
                    [field](RunConfig& c, const std::string& v) { c.*field = v; }};
        };
        auto int_key = [&t](const std::string& k, int RunConfig::* field) {
            t[k] = {[field](const RunConfig& c) { return std::to_string(c.*field); },
                    [k, field](RunConfig& c, const std::string& v) { c.*field = parse_int(k, v); }};
        };
        auto dbl_key = [&t](const std::string& k, double RunConfig::* field) {
            t[k] = {[field](const RunConfig& c) { return double_str(c.*field); },
                    [k, field](RunConfig& c, const std::string& v) { c.*field = parse_double(k, v); }};
        };
        str_key("data", &RunConfig::data_root);
        str_key("out", &RunConfig::out_dir);
        str_key("model", &RunConfig::model);
        int_key("input", &RunConfig::input);
        t["seed"] = {[](const RunConfig& c) { return std::to_string(c.seed); },
                     [](RunConfig& c, const std::string& v) { c.seed = parse_u64("seed", v); }};
        t["force"] = {[](const RunConfig& c) { return bool_str(c.force); },
                      [](RunConfig& c, const std::string& v) { c.force = parse_bool("force", v); }};
        str_key("class0", &RunConfig::class0);
        str_key("class1", &RunConfig::class1);
        int_key("epochs", &RunConfig::epochs);
        int_key("batch", &RunConfig::batch);
        dbl_key("lr", &RunConfig::lr);
        dbl_key("target_acc", &RunConfig::target_acc);
        str_key("loss", &RunConfig::loss);
        str_key("checkpoint", &RunConfig::checkpoint);
        str_key("split", &RunConfig::split);
        str_key("metrics", &RunConfig::metrics_file);
        int_key("vit.patch", &RunConfig::vit_patch);
        int_key("vit.dim", &RunConfig::vit_dim);
        int_key("vit.heads", &RunConfig::vit_heads);
        int_key("vit.layers", &RunConfig::vit_layers);
        int_key("vit.mlp", &RunConfig::vit_mlp);
        int_key("gan.latent", &RunConfig::gan_latent);
        dbl_key("gan.lr", &RunConfig::gan_lr);
        dbl_key("gan.beta1", &RunConfig::gan_beta1);
        int_key("gan.epochs", &RunConfig::gan_epochs);
        int_key("gan.batch", &RunConfig::gan_batch);
        str_key("gan.loss", &RunConfig::gan_loss);
        int_key("gan.image", &RunConfig::gan_image);
        int_key("gan.report_interval", &RunConfig::gan_report_interval);
        int_key("gan.save_interval", &RunConfig::gan_save_interval);
        int_key("augment.per_class", &RunConfig::augment_per_class);
        str_key("augment.gen0", &RunConfig::augment_gen0);
        str_key("augment.gen1", &RunConfig::augment_gen1);
        str_key("augment.batch_id", &RunConfig::augment_batch_id);
        int_key("synth.per_class", &RunConfig::synth_per_class);
        int_key("synth.size", &RunConfig::synth_size);
        dbl_key("enhance.saturation", &RunConfig::enhance_saturation);
        dbl_key("enhance.contrast", &RunConfig::enhance_contrast);
        dbl_key("enhance.brightness", &RunConfig::enhance_brightness);
        return t;
    }();
    return table;
}

size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (size_t j = 1; j <= b.size(); ++j) {
            const size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

// True when `small` is a subsequence of `big` with the same first letter
// ("lr" inside "learningrate").
bool abbreviates(const std::string& small, const std::string& big) {
    if (small.empty() || big.empty() || small[0] != big[0]) return false;
    size_t i = 0;
    for (const char c : big) {
        if (i < small.size() && small[i] == c) ++i;
    }
    return i == small.size();
}

std::string nearest_key(const std::string& key) {
    std::string best;
    size_t best_d = static_cast<size_t>(-1);
    size_t best_len = static_cast<size_t>(-1);
    for (const auto& [k, info] : key_table()) {
        // Compare against the full key and its leaf (so "learningrate"
        // suggests "lr" rather than something section-qualified).
        const size_t dot = k.rfind('.');
        const std::string leaf = dot == std::string::npos ? k : k.substr(dot + 1);
        for (const std::string& cand : {k, leaf}) {
            size_t d = edit_distance(key, cand);
            if (abbreviates(cand, key) || abbreviates(key, cand)) d = std::min<size_t>(d, 1);
            if (d < best_d || (d == best_d && k.size() < best_len)) {
                best_d = d;
                best_len = k.size();
                best = k;
            }
        }
    }
    return best;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

}  // namespace

std::vector<std::string> config_keys() {
    std::vector<std::string> keys;
    for (const auto& [k, info] : key_table()) keys.push_back(k);
    return keys;
}

void config_set(RunConfig& config, const std::string& key, const std::string& value) {
    const auto& table = key_table();
    const auto it = table.find(key);
    if (it == table.end()) {
        throw UsageError("config: unknown key '" + key + "' (did you mean '" + nearest_key(key) +
                         "'?)");
    }
    it->second.set(config, value);
    config.set_keys.insert(key);
}

std::string config_get(const RunConfig& config, const std::string& key) {
    const auto& table = key_table();
    const auto it = table.find(key);
    if (it == table.end()) {
        throw UsageError("config: unknown key '" + key + "' (did you mean '" + nearest_key(key) +
                         "'?)");
    }
    return it->second.get(config);
}

void load_config_file(RunConfig& config, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("config: cannot open " + path.string());
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw UsageError("config: " + path.string() + ":" + std::to_string(lineno) +
                                 ": unterminated section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw UsageError("config: " + path.string() + ":" + std::to_string(lineno) +
                             ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw UsageError("config: " + path.string() + ":" + std::to_string(lineno) +
                             ": empty key");
        }
        const std::string full = section.empty() ? key : section + "." + key;
        try {
            config_set(config, full, value);
        } catch (const UsageError& e) {
            throw UsageError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

RunConfig resolve_config(const std::filesystem::path& file,
                         const std::vector<std::pair<std::string, std::string>>& overrides) {
    RunConfig config;
    if (!file.empty()) load_config_file(config, file);
    for (const auto& [k, v] : overrides) config_set(config, k, v);
    return config;
}

std::string serialize_config(const RunConfig& config) {
    std::ostringstream os;
    os << "# resolved configuration\n";
    for (const auto& [k, info] : key_table()) {
        os << k << " = " << info.get(config) << "\n";
    }
    return os.str();
}

}  // namespace acdl::pipeline
