#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <fstream>

#include "doctest.h"
#include "pipeline/config.hpp"
#include "testutil.hpp"

using namespace acdl;
using acdl::pipeline::RunConfig;

namespace {

std::filesystem::path write_file(const test::TempDir& dir, const std::string& name,
                                 const std::string& text) {
    const auto p = dir.path() / name;
    std::ofstream out(p);
    out << text;
    return p;
}

}  // namespace

TEST_CASE("defaults and empty file") {
    test::TempDir tmp("cfg");
    RunConfig c = pipeline::resolve_config(write_file(tmp, "empty.cfg", "\n# only a comment\n\n"), {});
    CHECK(c.lr == 1e-3);
    CHECK(c.model == "cnn");
    CHECK(c.seed == 42);
    CHECK(c.gan_beta1 == 0.5);
    CHECK(c.gan_lr == 2e-4);
    CHECK(c.vit_patch == 16);
    CHECK(c.vit_dim == 64);
    CHECK(c.vit_heads == 4);
    CHECK(c.vit_layers == 8);
    CHECK(c.vit_mlp == 128);
    CHECK(c.enhance_saturation == 1.3);
    CHECK(c.enhance_contrast == 1.2);
    CHECK(c.enhance_brightness == 0.05);
    CHECK(c.class0 == "Non Accident");
    CHECK(c.class1 == "Accident");
    CHECK(c.set_keys.empty());
}

TEST_CASE("flags override the file") {
    test::TempDir tmp("cfg");
    const auto file = write_file(tmp, "a.cfg", "lr = 0.01\nepochs = 7\n");
    RunConfig c = pipeline::resolve_config(file, {{"lr", "0.001"}});
    CHECK(c.lr == 0.001);
    CHECK(c.epochs == 7);
    CHECK(c.was_set("lr"));
    CHECK(c.was_set("epochs"));
    CHECK_FALSE(c.was_set("batch"));
}

TEST_CASE("unknown keys fail with a suggestion") {
    RunConfig c;
    try {
        pipeline::config_set(c, "learningrate", "0.1");
        FAIL("expected UsageError");
    } catch (const UsageError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("learningrate") != std::string::npos);
        CHECK(msg.find("'lr'") != std::string::npos);
    }
    CHECK_THROWS_AS(pipeline::config_set(c, "vit.patchsize", "8"), UsageError);
    // Errors, not warnings: value untouched.
    CHECK(c.lr == 1e-3);
}

TEST_CASE("bad values carry the key name") {
    RunConfig c;
    CHECK_THROWS_AS(pipeline::config_set(c, "epochs", "many"), UsageError);
    CHECK_THROWS_AS(pipeline::config_set(c, "lr", "fast"), UsageError);
    CHECK_THROWS_AS(pipeline::config_set(c, "force", "maybe"), UsageError);
}

TEST_CASE("file dialect: sections, dotted keys, comments, line numbers") {
    test::TempDir tmp("cfg");
    const auto file = write_file(tmp, "b.cfg",
                                 "# classifier\n"
                                 "model = vit\n"
                                 "vit.patch = 8\n"
                                 "[gan]\n"
                                 "lr = 0.0001   # quarter of the default\n"
                                 "epochs = 9\n");
    RunConfig c;
    pipeline::load_config_file(c, file);
    CHECK(c.model == "vit");
    CHECK(c.vit_patch == 8);
    CHECK(c.gan_lr == 0.0001);
    CHECK(c.gan_epochs == 9);

    // Parse errors name the line.
    const auto bad = write_file(tmp, "bad.cfg", "model = cnn\nthis line has no equals\n");
    try {
        RunConfig c2;
        pipeline::load_config_file(c2, bad);
        FAIL("expected UsageError");
    } catch (const UsageError& e) {
        CHECK(std::string(e.what()).find(":2") != std::string::npos);
    }

    const auto unknown = write_file(tmp, "unknown.cfg", "\n\nlearningrate = 3\n");
    try {
        RunConfig c3;
        pipeline::load_config_file(c3, unknown);
        FAIL("expected UsageError");
    } catch (const UsageError& e) {
        const std::string msg = e.what();
        CHECK(msg.find(":3") != std::string::npos);
        CHECK(msg.find("'lr'") != std::string::npos);
    }
}

TEST_CASE("serialized config reparses to the same values") {
    RunConfig c;
    pipeline::config_set(c, "model", "vit");
    pipeline::config_set(c, "lr", "0.0003");
    pipeline::config_set(c, "gan.epochs", "17");
    pipeline::config_set(c, "data", "some/dir");
    const std::string echo = pipeline::serialize_config(c);

    test::TempDir tmp("cfg");
    const auto file = write_file(tmp, "echo.cfg", echo);
    RunConfig back;
    pipeline::load_config_file(back, file);
    for (const std::string& key : pipeline::config_keys()) {
        CHECK(pipeline::config_get(back, key) == pipeline::config_get(c, key));
    }
}

TEST_CASE("config_get round-trips every key") {
    RunConfig c;
    for (const std::string& key : pipeline::config_keys()) {
        const std::string v = pipeline::config_get(c, key);
        if (v.empty()) continue;  // path-like keys default to empty
        pipeline::config_set(c, key, v);
        CHECK(pipeline::config_get(c, key) == v);
    }
    CHECK_THROWS_AS(pipeline::config_get(c, "nope"), UsageError);
}
