#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hkt/hodge.hpp"

namespace hkt {

// Parsed and validated experiment configuration (JSON, schema in
// schemas/config.schema.json). Invalid input throws ConfigError before any
// computation starts.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    int grid_n = 16;
    std::string model_kind = "pair_groupoid"; // or "cotangent"
    cplx sigma = cplx(1.0, 0.0);
    double p_max = 1.0;
    std::vector<RhoMode> rho_modes;

    int series_N = 8;
    int mc_slope_N = 5; // odd truncation used for the Maurer-Cartan order study
    double sobolev_s = 3.0;
    double green_tol = 1e-13;
    int green_max_iter = 2000;

    int samples = 100;
    double eps = 1.0;
    double fd_step = 1e-2;
    std::vector<cplx> zeta_probes;

    // tolerances (defaults are the acceptance values)
    double tol_paper_identity = 1e-12;
    double tol_lemma = 1e-8;
    double tol_eq41 = 1e-8;
    double tol_odd = 1e-10;
    double tol_mc_slope = 0.3;
    double tol_kernel_formula = 1e-9;
    double tol_psi_identity = 1e-10;
    double tol_antidiagonal = 1e-9;
    double tol_quaternion = 1e-9;
    double tol_s1 = 1e-10;
    double tol_real_structure = 1e-10;
    double tol_nijenhuis_slope = 0.3;
    double sv_gap = 1e3;

    std::uint64_t seed = 20240601;
    std::string out_dir;
    bool smoke = false;

    std::string loop_file; // optional input for bundle-indices

    static ExperimentConfig from_json_text(const std::string& text);
    static ExperimentConfig from_file(const std::string& path);
    static ExperimentConfig defaults(bool smoke);
    std::string to_json_text() const;
    void validate() const;
};

} // namespace hkt
