// CLI driver. Links only the C API (hkverify.h); all engine work happens
// behind the shared library boundary.
#include "hkverify.h"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <string>

namespace {

int run_command(const std::string& command, const std::string& config_path, long long seed,
                const std::string& out_dir, bool smoke, const std::string& loop_file) {
    char err[1024] = {0};
    hkv_config* cfg = nullptr;
    if (!config_path.empty()) {
        cfg = hkv_config_from_file(config_path.c_str(), err, sizeof err);
        if (!cfg) {
            std::fprintf(stderr, "config error: %s\n", err);
            return HKV_CONFIG_ERROR;
        }
    } else {
        cfg = hkv_config_default(smoke ? 1 : 0);
    }
    if (seed >= 0)
        hkv_config_set_seed(cfg, static_cast<uint64_t>(seed));
    if (!out_dir.empty())
        hkv_config_set_out_dir(cfg, out_dir.c_str());
    if (!loop_file.empty())
        hkv_config_set_loop_file(cfg, loop_file.c_str());

    hkv_report* rep = hkv_run(cfg, command.c_str(), err, sizeof err);
    if (!rep) {
        std::fprintf(stderr, "%s\n", err);
        hkv_config_free(cfg);
        return err[0] == 'c' ? HKV_CONFIG_ERROR : HKV_RUNTIME_ERROR;
    }
    std::fputs(hkv_report_text(rep), stdout);
    int code = static_cast<int>(hkv_report_status(rep));
    if (out_dir.empty()) // report went nowhere else; print it
        std::fputs(hkv_report_json(rep, 1), stdout), std::fputs("\n", stdout);
    hkv_report_free(rep);
    hkv_config_free(cfg);
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral verification engine for hyperkahler structures on torus models"};
    app.require_subcommand(1);
    app.fallthrough(); // allow global flags after the subcommand

    std::string config_path, out_dir, loop_file;
    long long seed = -1;
    bool smoke = false;
    app.add_option("--config", config_path, "JSON config file (see schemas/config.schema.json)");
    app.add_option("--seed", seed, "override the RNG seed");
    app.add_option("--out", out_dir, "output directory for reports and CSV artifacts");
    app.add_flag("--smoke", smoke, "reduced 16^4 profile with documented relaxed tolerances");

    auto* deform = app.add_subcommand("deform", "run the deformation recursion and its checks");
    auto* verify = app.add_subcommand("verify-realization",
                                      "verify the lifted two-parameter family pointwise");
    auto* twistor = app.add_subcommand("twistor-verify", "triple extraction and twistor identities");
    auto* bundle = app.add_subcommand("bundle-indices",
                                      "Birkhoff splitting analysis of normal-bundle loops");
    bundle->add_option("--loop", loop_file, "loop JSON file (Fourier coefficients)");
    auto* selftest = app.add_subcommand("selftest", "run the full acceptance suite");

    CLI11_PARSE(app, argc, argv);

    std::string cmd;
    if (deform->parsed()) cmd = "deform";
    if (verify->parsed()) cmd = "verify-realization";
    if (twistor->parsed()) cmd = "twistor-verify";
    if (bundle->parsed()) cmd = "bundle-indices";
    if (selftest->parsed()) cmd = "selftest";
    return run_command(cmd, config_path, seed, out_dir, smoke, loop_file);
}
