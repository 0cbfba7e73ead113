// Exercises the shared-library surface only: this file includes the public C
// header and nothing from src/.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "acdl/acdl.h"
#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct ConfigHandle {
    acdl_config* ptr;
    ConfigHandle() : ptr(acdl_config_create()) {}
    ~ConfigHandle() { acdl_config_destroy(ptr); }
    acdl_config* get() const { return ptr; }
};

struct ScratchDir {
    fs::path path;
    ScratchDir() {
        static std::mt19937_64 rng(std::random_device{}());
        path = fs::temp_directory_path() / ("acdl_capi_" + std::to_string(rng()));
        fs::create_directories(path);
    }
    ~ScratchDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::string get_key(const acdl_config* c, const char* key) {
    char buf[256];
    REQUIRE(acdl_config_get(c, key, buf, sizeof(buf)) == ACDL_OK);
    return buf;
}

}  // namespace

TEST_CASE("config handle lifecycle and key access") {
    ConfigHandle c;
    REQUIRE(c.get() != nullptr);
    CHECK(get_key(c.get(), "model") == "cnn");
    CHECK(get_key(c.get(), "seed") == "42");

    CHECK(acdl_config_set(c.get(), "model", "vit") == ACDL_OK);
    CHECK(get_key(c.get(), "model") == "vit");

    // Unknown key: usage error with a suggestion in the message.
    CHECK(acdl_config_set(c.get(), "learningrate", "0.1") == ACDL_ERROR_USAGE);
    CHECK(std::string(acdl_last_error()).find("'lr'") != std::string::npos);

    // Bad value: usage error.
    CHECK(acdl_config_set(c.get(), "epochs", "banana") == ACDL_ERROR_USAGE);

    // Null arguments are usage errors, not crashes.
    CHECK(acdl_config_set(nullptr, "lr", "1") == ACDL_ERROR_USAGE);
    CHECK(acdl_config_set(c.get(), nullptr, "1") == ACDL_ERROR_USAGE);
    CHECK(acdl_config_load_file(c.get(), nullptr) == ACDL_ERROR_USAGE);

    // Truncating get.
    char tiny[3];
    REQUIRE(acdl_config_get(c.get(), "model", tiny, sizeof(tiny)) == ACDL_OK);
    CHECK(std::string(tiny) == "vi");

    CHECK(std::string(acdl_version_string()).find("acdl") != std::string::npos);
}

TEST_CASE("config file loading through the C API") {
    ScratchDir tmp;
    const fs::path file = tmp.path / "run.cfg";
    std::ofstream(file) << "model = ftcnn\n[gan]\nepochs = 3\n";
    ConfigHandle c;
    REQUIRE(acdl_config_load_file(c.get(), file.string().c_str()) == ACDL_OK);
    CHECK(get_key(c.get(), "model") == "ftcnn");
    CHECK(get_key(c.get(), "gan.epochs") == "3");

    // Flag-style overrides win over the file.
    CHECK(acdl_config_set(c.get(), "model", "cnn") == ACDL_OK);
    CHECK(get_key(c.get(), "model") == "cnn");

    // Missing file: usage error naming the path.
    CHECK(acdl_config_load_file(c.get(), (tmp.path / "nope.cfg").string().c_str()) ==
          ACDL_ERROR_USAGE);
    CHECK(std::string(acdl_last_error()).find("nope.cfg") != std::string::npos);

    // Parse errors carry the line number.
    const fs::path bad = tmp.path / "bad.cfg";
    std::ofstream(bad) << "model = cnn\noops\n";
    CHECK(acdl_config_load_file(c.get(), bad.string().c_str()) == ACDL_ERROR_USAGE);
    CHECK(std::string(acdl_last_error()).find(":2") != std::string::npos);
}

TEST_CASE("evaluate without a checkpoint is a usage error naming the path") {
    ConfigHandle c;
    CHECK(acdl_run_evaluate(c.get()) == ACDL_ERROR_USAGE);
    CHECK(std::string(acdl_last_error()).find("checkpoint") != std::string::npos);

    CHECK(acdl_config_set(c.get(), "checkpoint", "missing/model.ckpt") == ACDL_OK);
    CHECK(acdl_run_evaluate(c.get()) == ACDL_ERROR_USAGE);
    CHECK(std::string(acdl_last_error()).find("missing/model.ckpt") != std::string::npos);
}

TEST_CASE("mini pipeline through the C API") {
    ScratchDir tmp;
    const std::string data_dir = (tmp.path / "data").string();
    const std::string run_dir = (tmp.path / "run").string();

    ConfigHandle c;
    REQUIRE(acdl_config_set(c.get(), "data", data_dir.c_str()) == ACDL_OK);
    REQUIRE(acdl_config_set(c.get(), "out", run_dir.c_str()) == ACDL_OK);
    REQUIRE(acdl_config_set(c.get(), "synth.per_class", "4") == ACDL_OK);
    REQUIRE(acdl_config_set(c.get(), "synth.size", "32") == ACDL_OK);
    REQUIRE(acdl_config_set(c.get(), "input", "32") == ACDL_OK);
    REQUIRE(acdl_config_set(c.get(), "epochs", "1") == ACDL_OK);
    REQUIRE(acdl_config_set(c.get(), "batch", "4") == ACDL_OK);

    REQUIRE(acdl_run_synth_data(c.get()) == ACDL_OK);
    CHECK(fs::exists(fs::path(data_dir) / "manifest.json"));

    // Rerunning synth-data without force refuses to overwrite.
    CHECK(acdl_run_synth_data(c.get()) == ACDL_ERROR_USAGE);
    REQUIRE(acdl_config_set(c.get(), "force", "true") == ACDL_OK);
    REQUIRE(acdl_run_synth_data(c.get()) == ACDL_OK);

    REQUIRE(acdl_run_train(c.get()) == ACDL_OK);
    CHECK(fs::exists(fs::path(run_dir) / "model.ckpt"));
    CHECK(fs::exists(fs::path(run_dir) / "curves.csv"));
    CHECK(fs::exists(fs::path(run_dir) / "config.txt"));

    REQUIRE(acdl_config_set(c.get(), "checkpoint", (run_dir + "/model.ckpt").c_str()) == ACDL_OK);
    REQUIRE(acdl_run_evaluate(c.get()) == ACDL_OK);
    CHECK(fs::exists(fs::path(run_dir) / "metrics.json"));
    CHECK(fs::exists(fs::path(run_dir) / "roc.csv"));
    CHECK(fs::exists(fs::path(run_dir) / "predictions.csv"));

    REQUIRE(acdl_run_report(c.get()) == ACDL_OK);
    CHECK(fs::exists(fs::path(run_dir) / "report.txt"));

    // The rendered report carries the class rows.
    std::ifstream report(fs::path(run_dir) / "report.txt");
    std::string text((std::istreambuf_iterator<char>(report)), std::istreambuf_iterator<char>());
    CHECK(text.find("Non Accident") != std::string::npos);
    CHECK(text.find("Accident") != std::string::npos);
    CHECK(text.find("Weighted Avg") != std::string::npos);

    // Preprocess materializes the resize/enhance chain under its out dir.
    const std::string prep_dir = (tmp.path / "prep").string();
    ConfigHandle p;
    REQUIRE(acdl_config_set(p.get(), "data", data_dir.c_str()) == ACDL_OK);
    REQUIRE(acdl_config_set(p.get(), "out", prep_dir.c_str()) == ACDL_OK);
    REQUIRE(acdl_config_set(p.get(), "input", "16") == ACDL_OK);
    REQUIRE(acdl_run_preprocess(p.get()) == ACDL_OK);
    CHECK(fs::exists(fs::path(prep_dir) / "preprocessed" / "train" / "Accident"));
    CHECK(fs::exists(fs::path(prep_dir) / "preprocessed" / "val" / "Non Accident"));
}

TEST_CASE("the echoed config plus seed reproduces a run bit-identically") {
    ScratchDir tmp;
    const std::string data_dir = (tmp.path / "data").string();
    const std::string run_a = (tmp.path / "a").string();
    const std::string run_b = (tmp.path / "b").string();

    ConfigHandle c;
    REQUIRE(acdl_config_set(c.get(), "data", data_dir.c_str()) == ACDL_OK);
    REQUIRE(acdl_config_set(c.get(), "out", run_a.c_str()) == ACDL_OK);
    REQUIRE(acdl_config_set(c.get(), "synth.per_class", "6") == ACDL_OK);
    REQUIRE(acdl_config_set(c.get(), "synth.size", "32") == ACDL_OK);
    REQUIRE(acdl_config_set(c.get(), "input", "32") == ACDL_OK);
    REQUIRE(acdl_config_set(c.get(), "epochs", "2") == ACDL_OK);
    REQUIRE(acdl_config_set(c.get(), "batch", "4") == ACDL_OK);
    REQUIRE(acdl_config_set(c.get(), "seed", "123") == ACDL_OK);
    REQUIRE(acdl_run_synth_data(c.get()) == ACDL_OK);
    REQUIRE(acdl_run_train(c.get()) == ACDL_OK);

    // Fresh config from the echo; only the output directory changes.
    ConfigHandle echo;
    REQUIRE(acdl_config_load_file(echo.get(), (run_a + "/config.txt").c_str()) == ACDL_OK);
    REQUIRE(acdl_config_set(echo.get(), "out", run_b.c_str()) == ACDL_OK);
    REQUIRE(acdl_run_train(echo.get()) == ACDL_OK);

    auto bytes = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    };
    CHECK(bytes(fs::path(run_a) / "curves.csv") == bytes(fs::path(run_b) / "curves.csv"));
    CHECK(bytes(fs::path(run_a) / "model.ckpt") == bytes(fs::path(run_b) / "model.ckpt"));
}
