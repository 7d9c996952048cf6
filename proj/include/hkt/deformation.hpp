#pragma once

#include <memory>
#include <vector>

#include "hkt/hodge.hpp"

namespace hkt {

struct SeriesOrderDiag {
    int n = 0;
    double norm_l2 = 0.0;      // |omega_n|_l2
    double norm_sob = 0.0;     // |omega_n|_{H^s}
    double eq_residual = 0.0;  // |dbar w_n + del gamma_n| / |del gamma_n|
    double del_residual = 0.0; // |del w_n|
    double dbar_star_residual = 0.0;
    double lefschetz_residual = 0.0; // |w_n ^ w_1|
    int green_iterations = 0;
    double green_residual = 0.0;
};

// Truncated solution omega(zeta) = sum_{n=1}^{N} omega_n zeta^n of
// d w + 1/2 del i_sigma(w ^ w) = 0 built by the Green-operator recursion
// omega_n = del dbar* G sum_{i+j=n} 1/2 i_sigma(omega_i ^ omega_j).
class DeformationSeries {
public:
    DeformationSeries(Bivector sigma, std::shared_ptr<const Kahler> K, int N, ComplexForm seed);

    int truncation() const { return N_; }
    const Bivector& sigma() const { return sigma_; }
    const Kahler& kahler() const { return *K_; }
    std::shared_ptr<const Kahler> kahler_ptr() const { return K_; }
    const ComplexForm& omega(int n) const { return omega_[static_cast<std::size_t>(n - 1)]; }
    // gamma_n = sum_{i+j=n} 1/2 i_sigma(omega_i ^ omega_j), n >= 2
    const ComplexForm& gamma(int n) const { return gamma_[static_cast<std::size_t>(n - 2)]; }

    // omega(zeta), Horner
    ComplexForm omega_at(cplx zeta) const;
    // beta_n = omega_n + gamma_n, as the ((1,1), (0,2)) pair
    std::pair<ComplexForm, ComplexForm> beta(int n) const;
    // beta(zeta) evaluated
    std::pair<ComplexForm, ComplexForm> beta_at(cplx zeta) const;

    double sobolev_s = 3.0;

    // overwrite a coefficient; used by diagnostics and negative-control tests
    void inject_omega(int n, ComplexForm w) { omega_[static_cast<std::size_t>(n - 1)] = std::move(w); }

private:
    Bivector sigma_;
    std::shared_ptr<const Kahler> K_;
    int N_;
    std::vector<ComplexForm> omega_; // 1..N
    std::vector<ComplexForm> gamma_; // 2..N

public:
    // construction settings / diagnostics
    double green_tol = 1e-13;
    int green_max_iter = 2000;
    std::vector<SeriesOrderDiag> diag; // per order n = 2..N
    void build();                      // fills omega_, gamma_, diag
};

// convenience: seed = K->omega1()
DeformationSeries hitchin_series(const Bivector& sigma, std::shared_ptr<const Kahler> K, int N,
                                 double green_tol = 1e-13, int green_max_iter = 2000);

// C_0, C_1, C_2, ... = 1, 1, 2, 5, 14, 42, ...
double catalan_number(int n);

struct OddVanishingReport {
    double max_odd_norm = 0.0;          // max_n |omega_{2n+1}|, n >= 1
    double max_even_contract_norm = 0.0; // max_n |i_sigma(omega_{2n} ^ omega_1)|
    bool pass(double tol) const { return max_odd_norm < tol && max_even_contract_norm < tol; }
};
OddVanishingReport odd_vanishing_check(const DeformationSeries& s);

// per-order closedness of beta: returns max over n of the two residuals
struct BetaClosedness {
    double max_del = 0.0;       // |del beta_n^{(1,1)}|
    double max_mixed = 0.0;     // |dbar beta_n^{(1,1)} + del beta_n^{(0,2)}|
};
BetaClosedness beta_closedness(const DeformationSeries& s);

// |dbar phi_z + 1/2 [phi_z, phi_z]| for phi_z = -sigma omega(z)
double mc_residual(const DeformationSeries& s, cplx zeta);

// min over random grid samples of the smallest singular value of the 2x2
// matrix (1 - phi_z phibar_z) restricted to T^{1,0}
double invertibility_margin(const DeformationSeries& s, cplx zeta, int samples, Rng& rng);

struct RadiusEstimate {
    std::vector<double> a;  // a_n = |omega_n|_{H^s}, index n = 1..N
    double c_est = 0.0;
    double radius = 0.0;    // 1/(4 c a1); +inf if all higher a_n vanish
    bool catalan_ok = true; // a_n <= c^{n-1} a_1^n C_{n-1}
};
RadiusEstimate radius_estimate(const DeformationSeries& s);

// slope of log(mc_residual) vs log(zeta) over a geometric sweep
struct McSweep {
    std::vector<double> zeta;
    std::vector<double> residual;
    double slope = 0.0;
};
McSweep mc_order_sweep(const DeformationSeries& s, double z_lo, double z_hi, int points);

} // namespace hkt
