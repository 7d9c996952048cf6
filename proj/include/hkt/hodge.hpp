#pragma once

#include <functional>
#include <optional>

#include "hkt/forms.hpp"
#include "hkt/rng.hpp"

namespace hkt {

// One cosine mode of the Kahler potential: rho += amp * cos(2 pi k.x)
struct RhoMode {
    int k[4];
    double amp;
};

struct GreenStats {
    int iterations = 0;
    double residual = 0.0;
    std::vector<double> history;
};

// Metric data of a Kahler form omega1 = (i/2) h_{jk} dz^j ^ dzbar^k on the
// torus, with h = id + 2 d^2 rho / dz_j dzbar_k for a real potential rho.
//
// Discretization: metric weights act pointwise on the collocation grid and
// derivatives are full-spectrum spectral, so <dbar a, b> = <a, dbar* b> holds
// to roundoff on the grid at any resolution.
class Kahler {
public:
    Kahler(std::shared_ptr<const Grid> g, const std::vector<RhoMode>& modes = {});

    const Grid& grid() const { return *grid_; }
    std::shared_ptr<const Grid> grid_ptr() const { return grid_; }
    bool flat() const { return flat_; }
    const ComplexForm& omega1() const { return omega1_; }
    double min_metric_eigenvalue() const { return min_eig_; }
    double closedness_residual() const;
    double reality_residual() const;

    // physical metric entries h_{jk} and det h at flat index
    cplx h(int j, int k, std::size_t ix) const { return h_[static_cast<std::size_t>(2 * j + k)][ix]; }
    double det_h(std::size_t ix) const { return det_[ix]; }

    // L2(omega1) inner product of two equal-bidegree forms
    cplx l2_inner(const ComplexForm& a, const ComplexForm& b) const;

    // formal adjoint of dbar in L2(omega1); q >= 1
    ComplexForm delbar_star(const ComplexForm& a) const;

    // Dolbeault Laplacian dbar dbar* + dbar* dbar
    ComplexForm laplacian(const ComplexForm& a) const;

    // harmonic projection; supported where the harmonic space is explicit:
    // flat metric (all bidegrees: k = 0 modes) and bidegree (0,2)/(2,0)/(0,0)
    // for perturbed metrics
    ComplexForm harmonic_projection(const ComplexForm& a) const;

    // Green operator: Lap(G a) = a - H(a), G(harmonic) = 0.
    // Flat path divides by the exact symbol 2 pi^2 |k|^2; perturbed path runs
    // flat-preconditioned CG on the grid-hermitian operator W Lap (bidegree
    // (0,2) only) to relative tolerance tol.
    ComplexForm green(const ComplexForm& a, double tol, int max_iter, GreenStats* stats = nullptr) const;

    // Lemma solution omega = del dbar* G gamma for (0,2) gamma
    ComplexForm lemma_solve(const ComplexForm& gamma, double tol, int max_iter,
                            GreenStats* stats = nullptr) const;

    // max over a random battery of |([dbar*,L] - i del) a| / |a|
    double kahler_identity_residual(Rng& rng, int trials = 3) const;

    static constexpr double flat_symbol_factor = 2.0; // Lap = 2 pi^2 |k|^2 on flat metric

private:
    void apply_weight(int p, int q, std::vector<std::vector<cplx>>& phys, bool inverse) const;
    ComplexForm dbar_dag_flat(const ComplexForm& a) const;

    std::shared_ptr<const Grid> grid_;
    bool flat_;
    std::array<std::vector<cplx>, 4> h_;    // h_{jk} physical
    std::array<std::vector<cplx>, 4> hinv_; // h^{-1} physical
    std::vector<double> det_;
    double min_eig_;
    ComplexForm omega1_;
};

} // namespace hkt
