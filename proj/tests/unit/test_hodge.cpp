#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hkt/hodge.hpp"

#include <cmath>

using namespace hkt;

namespace {
const double kPi = 3.14159265358979323846;

std::shared_ptr<const Kahler> flat16() {
    return std::make_shared<Kahler>(std::make_shared<Grid>(16));
}

std::shared_ptr<const Kahler> perturbed16(double amp = 0.02) {
    std::vector<RhoMode> modes = {{{1, 0, 0, 0}, amp}, {{0, 0, 1, 0}, amp * 0.6}};
    return std::make_shared<Kahler>(std::make_shared<Grid>(16), modes);
}
} // namespace

TEST_CASE("kahler structure: closed, real, positive") {
    auto K = perturbed16();
    CHECK(K->closedness_residual() < 1e-12);
    CHECK(K->reality_residual() < 1e-13);
    CHECK(K->min_metric_eigenvalue() > 0.0);
    CHECK(!K->flat());
    CHECK(flat16()->flat());
}

TEST_CASE("kahler rejects non-positive metrics") {
    std::vector<RhoMode> modes = {{{1, 0, 0, 0}, 0.08}}; // 2 pi^2 * 0.16 > 1
    CHECK_THROWS(Kahler(std::make_shared<Grid>(16), modes));
}

TEST_CASE("volume identity: omega1^2 / 2 = det(h) dx") {
    auto K = perturbed16();
    ComplexForm w2 = wedge(K->omega1(), K->omega1());
    // canonical (2,2) coefficient relates to dx by e_c = 4 dx, so coeff = det/4
    auto phys = w2.comp(3, 3).to_physical();
    double worst = 0.0;
    for (std::size_t i = 0; i < phys.size(); ++i)
        worst = std::max(worst, std::abs(phys[i] / 2.0 - K->det_h(i) / 4.0));
    CHECK(worst < 1e-12);
}

TEST_CASE("adjointness of dbar* holds to roundoff on the grid") {
    for (auto K : {flat16(), perturbed16(), perturbed16(0.05)}) {
        Rng rng(101);
        auto g = K->grid_ptr();
        for (auto [p, q] : {std::pair<int, int>{0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 1}, {2, 2}}) {
            ComplexForm a = dense_random_form(g, p, q - 1, rng, 2);
            ComplexForm b = dense_random_form(g, p, q, rng, 2);
            cplx lhs = K->l2_inner(delbar(a), b);
            cplx rhs = K->l2_inner(a, K->delbar_star(b));
            CHECK(std::abs(lhs - rhs) / std::abs(lhs) < 1e-12);
        }
    }
}

TEST_CASE("dbar* of a constant form vanishes") {
    auto K = perturbed16();
    auto g = K->grid_ptr();
    ComplexForm c(g, 0, 2);
    c.comp(0, 3) = ScalarField::constant(g, cplx(1.0, 2.0));
    CHECK(K->delbar_star(c).l2() < 1e-13);
}

TEST_CASE("flat single-mode symbol: Lap = 2 pi^2 |k|^2 and green inverts it") {
    auto K = flat16();
    auto g = K->grid_ptr();
    ComplexForm gam(g, 0, 2);
    int k[4] = {1, 0, 0, 0};
    gam.comp(0, 3) = ScalarField::mode(g, k, 1.0);
    ComplexForm lap = K->laplacian(gam);
    cplx sym = lap.comp(0, 3).hat()[g->flat(1, 0, 0, 0)];
    CHECK(std::abs(sym - cplx(2.0 * kPi * kPi, 0.0)) < 1e-10);
    ComplexForm gr = K->green(gam, 1e-12, 100);
    cplx val = gr.comp(0, 3).hat()[g->flat(1, 0, 0, 0)];
    CHECK(std::abs(val * 2.0 * kPi * kPi - 1.0) < 1e-12);
}

TEST_CASE("green: harmonic input gives zero; Lap G + H = id; self-adjoint") {
    auto K = perturbed16();
    auto g = K->grid_ptr();
    ComplexForm c(g, 0, 2);
    c.comp(0, 3) = ScalarField::constant(g, 2.5);
    CHECK(K->green(c, 1e-12, 100).l2() == 0.0);

    Rng rng(17);
    ComplexForm gam = dense_random_form(g, 0, 2, rng, 1);
    GreenStats st;
    ComplexForm u = K->green(gam, 1e-13, 600, &st);
    ComplexForm resid = K->laplacian(u) + K->harmonic_projection(gam) - gam;
    CHECK(resid.l2() / gam.l2() < 1e-10);
    CHECK(st.iterations > 0);

    ComplexForm gam2 = dense_random_form(g, 0, 2, rng, 1);
    ComplexForm u2 = K->green(gam2, 1e-13, 600);
    cplx a = K->l2_inner(u, gam2), b = K->l2_inner(gam, u2);
    CHECK(std::abs(a - b) / std::abs(a) < 1e-9);
}

TEST_CASE("green reports non-convergence explicitly") {
    auto K = perturbed16(0.05);
    Rng rng(23);
    ComplexForm gam = dense_random_form(K->grid_ptr(), 0, 2, rng, 1);
    GreenStats st;
    CHECK_THROWS_AS((void)K->green(gam, 1e-13, 2, &st), std::runtime_error);
}

TEST_CASE("kahler identity residual: flat exact, small perturbation converges") {
    Rng rng(31);
    CHECK(flat16()->kahler_identity_residual(rng) < 1e-11);
    auto Ks = std::make_shared<Kahler>(std::make_shared<Grid>(16),
                                       std::vector<RhoMode>{{{1, 0, 0, 0}, 0.003}});
    double r16 = Ks->kahler_identity_residual(rng);
    CHECK(r16 < 1e-8);
    // truncation error shrinks under grid refinement
    auto Ks8 = std::make_shared<Kahler>(std::make_shared<Grid>(8),
                                        std::vector<RhoMode>{{{1, 0, 0, 0}, 0.003}});
    double r8 = Ks8->kahler_identity_residual(rng);
    CHECK(r16 < r8);
}

TEST_CASE("lemma_solve: constant gamma gives zero; linearity; three residuals") {
    auto K = perturbed16();
    auto g = K->grid_ptr();
    ComplexForm c(g, 0, 2);
    c.comp(0, 3) = ScalarField::constant(g, 1.0);
    CHECK(K->lemma_solve(c, 1e-12, 100).l2() == 0.0);

    Bivector sigma(g, 1.0);
    ComplexForm gamma = contract_sigma_pair(sigma, K->omega1(), K->omega1());
    ComplexForm w = K->lemma_solve(gamma, 1e-13, 600);
    CHECK(w.l2() > 1e-3); // nonzero output
    double sc = std::max(w.l2(), 1e-300);
    CHECK((delbar(w) + del(gamma)).l2() / del(gamma).l2() < 1e-8);
    CHECK(K->delbar_star(w).l2() / sc < 1e-8);
    CHECK(wedge(w, K->omega1()).l2() / sc < 1e-8);

    Rng rng(41);
    ComplexForm g1 = dense_random_form(g, 0, 2, rng, 1);
    ComplexForm g2 = dense_random_form(g, 0, 2, rng, 1);
    ComplexForm lhs = K->lemma_solve(g1 + g2, 1e-13, 600);
    ComplexForm rhs = K->lemma_solve(g1, 1e-13, 600) + K->lemma_solve(g2, 1e-13, 600);
    CHECK((lhs - rhs).l2() / std::max(lhs.l2(), 1e-300) < 1e-8);
}

TEST_CASE("flat green on other bidegrees via the exact symbol") {
    auto K = flat16();
    Rng rng(53);
    ComplexForm gam = random_form(K->grid_ptr(), 1, 1, rng, 2, 5);
    ComplexForm u = K->green(gam, 1e-12, 100);
    ComplexForm resid = K->laplacian(u) + K->harmonic_projection(gam) - gam;
    CHECK(resid.l2() / gam.l2() < 1e-11);
}

TEST_CASE("iterative green refuses unsupported bidegrees off the flat metric") {
    auto K = perturbed16();
    Rng rng(59);
    ComplexForm gam = random_form(K->grid_ptr(), 1, 1, rng, 1, 3);
    CHECK_THROWS(K->green(gam, 1e-10, 50));
}
