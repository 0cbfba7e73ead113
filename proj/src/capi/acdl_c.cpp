// extern-C surface over the pipeline. Exceptions are translated to status
// codes; messages land in a thread-local slot for acdl_last_error().

#include "acdl/acdl.h"

#include <cstring>
#include <iostream>
#include <string>

#include "pipeline/commands.hpp"

using acdl::pipeline::RunConfig;

struct acdl_config {
    RunConfig impl;
};

namespace {

thread_local std::string g_last_error;

template <class Fn>
acdl_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return ACDL_OK;
    } catch (const acdl::UsageError& e) {
        g_last_error = e.what();
        return ACDL_ERROR_USAGE;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return ACDL_ERROR_RUNTIME;
    } catch (...) {
        g_last_error = "unknown error";
        return ACDL_ERROR_RUNTIME;
    }
}

acdl_status require(const void* p, const char* what) {
    if (p) return ACDL_OK;
    g_last_error = std::string("null ") + what;
    return ACDL_ERROR_USAGE;
}

}  // namespace

extern "C" {

const char* acdl_version_string(void) { return "acdl 1.0.0"; }

acdl_config* acdl_config_create(void) { return new (std::nothrow) acdl_config{}; }

void acdl_config_destroy(acdl_config* config) { delete config; }

acdl_status acdl_config_load_file(acdl_config* config, const char* path) {
    if (acdl_status s = require(config, "config"); s != ACDL_OK) return s;
    if (acdl_status s = require(path, "path"); s != ACDL_OK) return s;
    return guarded([&] { acdl::pipeline::load_config_file(config->impl, path); });
}

acdl_status acdl_config_set(acdl_config* config, const char* key, const char* value) {
    if (acdl_status s = require(config, "config"); s != ACDL_OK) return s;
    if (acdl_status s = require(key, "key"); s != ACDL_OK) return s;
    if (acdl_status s = require(value, "value"); s != ACDL_OK) return s;
    return guarded([&] { acdl::pipeline::config_set(config->impl, key, value); });
}

acdl_status acdl_config_get(const acdl_config* config, const char* key, char* buf, size_t buflen) {
    if (acdl_status s = require(config, "config"); s != ACDL_OK) return s;
    if (acdl_status s = require(key, "key"); s != ACDL_OK) return s;
    if (acdl_status s = require(buf, "buffer"); s != ACDL_OK) return s;
    return guarded([&] {
        const std::string v = acdl::pipeline::config_get(config->impl, key);
        if (buflen == 0) throw acdl::UsageError("zero-length buffer");
        const size_t n = std::min(buflen - 1, v.size());
        std::memcpy(buf, v.data(), n);
        buf[n] = '\0';
    });
}

const char* acdl_last_error(void) { return g_last_error.c_str(); }

#define ACDL_DEFINE_RUN(name, fn)                                             \
    acdl_status name(const acdl_config* config) {                             \
        if (acdl_status s = require(config, "config"); s != ACDL_OK) return s; \
        return guarded([&] { acdl::pipeline::fn(config->impl, std::cout); }); \
    }

ACDL_DEFINE_RUN(acdl_run_synth_data, cmd_synth_data)
ACDL_DEFINE_RUN(acdl_run_preprocess, cmd_preprocess)
ACDL_DEFINE_RUN(acdl_run_train_gan, cmd_train_gan)
ACDL_DEFINE_RUN(acdl_run_augment, cmd_augment)
ACDL_DEFINE_RUN(acdl_run_train, cmd_train)
ACDL_DEFINE_RUN(acdl_run_evaluate, cmd_evaluate)
ACDL_DEFINE_RUN(acdl_run_report, cmd_report)

#undef ACDL_DEFINE_RUN

}  // extern "C"
