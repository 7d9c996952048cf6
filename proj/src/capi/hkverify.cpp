#include "hkverify.h"

#include "hkt/engine.hpp"

#include <cstring>
#include <string>

using hkt::ExperimentConfig;
using hkt::Report;

struct hkv_config {
    ExperimentConfig cfg;
    std::string json_cache;
};

struct hkv_report {
    Report rep;
    std::string json_timed;
    std::string json_plain;
    std::string text;
    explicit hkv_report(Report r) : rep(std::move(r)) {}
};

namespace {

void put_err(char* err, size_t err_len, const std::string& msg) {
    if (!err || err_len == 0)
        return;
    std::strncpy(err, msg.c_str(), err_len - 1);
    err[err_len - 1] = '\0';
}

} // namespace

extern "C" {

const char* hkv_version(void) { return "1.0.0"; }

hkv_config* hkv_config_from_json(const char* json_text, char* err, size_t err_len) {
    try {
        auto* c = new hkv_config{ExperimentConfig::from_json_text(json_text ? json_text : ""), {}};
        return c;
    } catch (const std::exception& e) {
        put_err(err, err_len, e.what());
        return nullptr;
    }
}

hkv_config* hkv_config_from_file(const char* path, char* err, size_t err_len) {
    try {
        auto* c = new hkv_config{ExperimentConfig::from_file(path ? path : ""), {}};
        return c;
    } catch (const std::exception& e) {
        put_err(err, err_len, e.what());
        return nullptr;
    }
}

hkv_config* hkv_config_default(int smoke) {
    return new hkv_config{ExperimentConfig::defaults(smoke != 0), {}};
}

void hkv_config_free(hkv_config* cfg) { delete cfg; }

void hkv_config_set_seed(hkv_config* cfg, uint64_t seed) {
    if (cfg)
        cfg->cfg.seed = seed;
}

void hkv_config_set_out_dir(hkv_config* cfg, const char* dir) {
    if (cfg)
        cfg->cfg.out_dir = dir ? dir : "";
}

void hkv_config_set_loop_file(hkv_config* cfg, const char* path) {
    if (cfg)
        cfg->cfg.loop_file = path ? path : "";
}

const char* hkv_config_json(hkv_config* cfg) {
    if (!cfg)
        return nullptr;
    cfg->json_cache = cfg->cfg.to_json_text();
    return cfg->json_cache.c_str();
}

hkv_report* hkv_run(const hkv_config* cfg, const char* command, char* err, size_t err_len) {
    if (!cfg || !command) {
        put_err(err, err_len, "null config or command");
        return nullptr;
    }
    try {
        Report rep = hkt::engine::run(command, cfg->cfg);
        return new hkv_report(std::move(rep));
    } catch (const hkt::ConfigError& e) {
        put_err(err, err_len, std::string("config error: ") + e.what());
        return nullptr;
    } catch (const std::exception& e) {
        put_err(err, err_len, e.what());
        return nullptr;
    }
}

hkv_status hkv_report_status(const hkv_report* rep) {
    if (!rep)
        return HKV_RUNTIME_ERROR;
    switch (rep->rep.exit_code()) {
    case 0: return HKV_PASS;
    case 1: return HKV_FAIL;
    default: return HKV_INDETERMINATE;
    }
}

const char* hkv_report_json(const hkv_report* rep, int with_timing) {
    if (!rep)
        return nullptr;
    auto* r = const_cast<hkv_report*>(rep);
    std::string& slot = with_timing ? r->json_timed : r->json_plain;
    slot = rep->rep.to_json(with_timing != 0);
    return slot.c_str();
}

const char* hkv_report_text(const hkv_report* rep) {
    if (!rep)
        return nullptr;
    auto* r = const_cast<hkv_report*>(rep);
    r->text = rep->rep.to_text();
    return r->text.c_str();
}

size_t hkv_report_num_checks(const hkv_report* rep) {
    return rep ? rep->rep.checks().size() : 0;
}

void hkv_report_free(hkv_report* rep) { delete rep; }

} // extern "C"
