#include "hkt/config.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

namespace hkt {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

cplx parse_complex(const json& j, const char* what) {
    if (j.is_number())
        return cplx(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return cplx(j[0].get<double>(), j[1].get<double>());
    throw ConfigError(std::string(what) + ": expected number or [re, im]");
}

template <typename T>
void take(const json& j, const char* key, T& out) {
    if (j.contains(key)) {
        try {
            out = j.at(key).get<T>();
        } catch (const json::exception&) {
            throw ConfigError(std::string("config field '") + key + "' has the wrong type");
        }
    }
}

} // namespace

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw ConfigError("cannot open config file " + path);
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return from_json_text(text);
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    ExperimentConfig c;
    if (j.contains("grid")) {
        take(j["grid"], "n", c.grid_n);
    }
    if (j.contains("model")) {
        const auto& m = j["model"];
        take(m, "kind", c.model_kind);
        if (m.contains("sigma"))
            c.sigma = parse_complex(m["sigma"], "model.sigma");
        take(m, "p_max", c.p_max);
    }
    if (j.contains("kahler") && j["kahler"].contains("rho_modes")) {
        for (const auto& e : j["kahler"]["rho_modes"]) {
            RhoMode rm{};
            if (!e.contains("k") || !e["k"].is_array() || e["k"].size() != 4)
                throw ConfigError("kahler.rho_modes[].k must be a 4-vector of integers");
            for (int i = 0; i < 4; ++i)
                rm.k[i] = e["k"][static_cast<std::size_t>(i)].get<int>();
            if (!e.contains("amp"))
                throw ConfigError("kahler.rho_modes[].amp missing");
            rm.amp = e["amp"].get<double>();
            c.rho_modes.push_back(rm);
        }
    }
    if (j.contains("series")) {
        const auto& s = j["series"];
        take(s, "N", c.series_N);
        take(s, "mc_slope_N", c.mc_slope_N);
        take(s, "sobolev_s", c.sobolev_s);
        take(s, "green_tol", c.green_tol);
        take(s, "green_max_iter", c.green_max_iter);
    }
    if (j.contains("probes")) {
        const auto& p = j["probes"];
        take(p, "samples", c.samples);
        take(p, "eps", c.eps);
        take(p, "fd_step", c.fd_step);
        if (p.contains("zeta_list"))
            for (const auto& e : p["zeta_list"])
                c.zeta_probes.push_back(parse_complex(e, "probes.zeta_list[]"));
    }
    if (j.contains("tolerances")) {
        const auto& t = j["tolerances"];
        take(t, "paper_identity", c.tol_paper_identity);
        take(t, "lemma", c.tol_lemma);
        take(t, "eq41", c.tol_eq41);
        take(t, "odd_vanishing", c.tol_odd);
        take(t, "mc_slope", c.tol_mc_slope);
        take(t, "kernel_formula", c.tol_kernel_formula);
        take(t, "psi_identity", c.tol_psi_identity);
        take(t, "antidiagonal", c.tol_antidiagonal);
        take(t, "quaternion", c.tol_quaternion);
        take(t, "s1_equivariance", c.tol_s1);
        take(t, "real_structure", c.tol_real_structure);
        take(t, "nijenhuis_slope", c.tol_nijenhuis_slope);
        take(t, "sv_gap", c.sv_gap);
    }
    take(j, "seed", c.seed);
    take(j, "out_dir", c.out_dir);
    take(j, "loop_file", c.loop_file);
    c.validate();
    return c;
}

void ExperimentConfig::validate() const {
    if (grid_n < 8 || grid_n % 2 != 0)
        throw ConfigError("grid.n must be even and >= 8");
    if (model_kind != "pair_groupoid" && model_kind != "cotangent")
        throw ConfigError("model.kind must be 'pair_groupoid' or 'cotangent'");
    if (model_kind == "pair_groupoid" && std::abs(sigma) == 0.0)
        throw ConfigError("pair_groupoid requires nonzero sigma");
    if (series_N < 1 || series_N > 16)
        throw ConfigError("series.N must be in [1, 16]");
    if (mc_slope_N < 1 || mc_slope_N % 2 == 0)
        throw ConfigError("series.mc_slope_N must be odd (first uncancelled order is N+1)");
    if (samples < 1)
        throw ConfigError("probes.samples must be positive");
    if (eps <= 0.0)
        throw ConfigError("probes.eps must be positive");
    if (green_tol <= 0.0 || green_tol >= 1e-3)
        throw ConfigError("series.green_tol out of range");
    double amp_sum = 0.0;
    for (const auto& m : rho_modes)
        amp_sum += std::abs(m.amp);
    if (amp_sum > 0.0505)
        throw ConfigError("kahler.rho_modes total amplitude too large for a positive metric");
}

std::string ExperimentConfig::to_json_text() const {
    ojson j;
    j["grid"]["n"] = grid_n;
    j["model"]["kind"] = model_kind;
    j["model"]["sigma"] = {sigma.real(), sigma.imag()};
    j["model"]["p_max"] = p_max;
    ojson modes = ojson::array();
    for (const auto& m : rho_modes) {
        ojson e;
        e["k"] = {m.k[0], m.k[1], m.k[2], m.k[3]};
        e["amp"] = m.amp;
        modes.push_back(e);
    }
    j["kahler"]["rho_modes"] = modes;
    j["series"]["N"] = series_N;
    j["series"]["mc_slope_N"] = mc_slope_N;
    j["series"]["sobolev_s"] = sobolev_s;
    j["series"]["green_tol"] = green_tol;
    j["series"]["green_max_iter"] = green_max_iter;
    j["probes"]["samples"] = samples;
    j["probes"]["eps"] = eps;
    j["probes"]["fd_step"] = fd_step;
    ojson zl = ojson::array();
    for (const auto& z : zeta_probes)
        zl.push_back({z.real(), z.imag()});
    j["probes"]["zeta_list"] = zl;
    j["seed"] = seed;
    j["out_dir"] = out_dir;
    if (!loop_file.empty())
        j["loop_file"] = loop_file;
    return j.dump(1);
}

ExperimentConfig ExperimentConfig::defaults(bool smoke) {
    ExperimentConfig c;
    c.smoke = smoke;
    c.grid_n = 16;
    c.model_kind = "pair_groupoid";
    c.sigma = cplx(1.0, 0.0);
    c.rho_modes = {
        {{1, 0, 0, 0}, 0.010},
        {{0, 0, 1, 0}, 0.008},
        {{1, 0, 1, 0}, 0.006},
        {{0, 1, -1, 0}, 0.004},
        {{2, 0, -1, 0}, 0.003},
    };
    c.series_N = 8;
    c.mc_slope_N = 5;
    c.samples = smoke ? 25 : 100;
    if (smoke) {
        // reduced-grid smoke profile: spectral truncation of the metric
        // weights is coarser, so identity tolerances are relaxed (documented
        // in the README)
        c.tol_lemma = 1e-6;
        c.tol_eq41 = 1e-7;
        c.tol_odd = 1e-8;
        c.tol_kernel_formula = 1e-8;
        c.tol_antidiagonal = 1e-8;
    }
    return c;
}

} // namespace hkt
