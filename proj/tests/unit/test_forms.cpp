#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hkt/forms.hpp"
#include "hkt/rng.hpp"

#include <cmath>

using namespace hkt;

namespace {
std::shared_ptr<const Grid> grid8() { return std::make_shared<Grid>(8); }
const double kPi = 3.14159265358979323846;
} // namespace

TEST_CASE("spectral round trip is the identity") {
    auto g = grid8();
    Rng rng(42);
    ScalarField f = random_field(g, rng, 2, 8);
    auto phys = f.to_physical();
    ScalarField back = ScalarField::from_physical(g, phys);
    double err = (back - f).l2() / f.l2();
    CHECK(err < 1e-13);
}

TEST_CASE("field is real iff coefficients are conjugate-symmetric") {
    auto g = grid8();
    Rng rng(7);
    ScalarField f = random_field(g, rng, 2, 6, /*real=*/true);
    double im = 0.0;
    for (const auto& v : f.to_physical())
        im = std::max(im, std::abs(v.imag()));
    CHECK(im < 1e-13);
    CHECK((f.conjugate() - f).l2() < 1e-13);
}

TEST_CASE("wedge: constant volume bookkeeping") {
    auto g = grid8();
    // dz1^dzb1 wedge dz2^dzb2 = dz1^dzb1^dz2^dzb2 = -(canonical e)
    ComplexForm a(g, 1, 1), b(g, 1, 1);
    a.comp(1, 1) = ScalarField::constant(g, 1.0);
    b.comp(2, 2) = ScalarField::constant(g, 1.0);
    ComplexForm w = wedge(a, b);
    CHECK(w.comp(3, 3).hat()[0].real() == doctest::Approx(-1.0).epsilon(1e-14));

    // w1 ^ w1 = 2 (i/2)^2 dz1^dzb1^dz2^dzb2, i.e. +1/2 in the canonical frame
    ComplexForm w1 = flat_kahler_form(g);
    ComplexForm ww = wedge(w1, w1);
    CHECK(ww.comp(3, 3).hat()[0].real() == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("wedge: graded commutativity on random forms") {
    auto g = grid8();
    Rng rng(3);
    for (auto [p1, q1, p2, q2] : {std::array<int, 4>{1, 0, 0, 1}, {1, 1, 1, 0}, {0, 1, 0, 1}}) {
        ComplexForm a = random_form(g, p1, q1, rng);
        ComplexForm b = random_form(g, p2, q2, rng);
        int d1 = p1 + q1, d2 = p2 + q2;
        double sgn = (d1 * d2) % 2 == 0 ? 1.0 : -1.0;
        ComplexForm lhs = wedge(a, b);
        ComplexForm rhs = cplx(sgn, 0.0) * wedge(b, a);
        CHECK((lhs - rhs).l2() / std::max(lhs.l2(), 1e-300) < 1e-13);
    }
}

TEST_CASE("derivatives: dbar^2 = 0, del^2 = 0, anticommutator, Leibniz") {
    auto g = grid8();
    Rng rng(5);
    ComplexForm a = random_form(g, 1, 0, rng);
    CHECK(delbar(delbar(a)).l2() / a.l2() < 1e-12);
    ComplexForm b = random_form(g, 0, 1, rng);
    CHECK(del(del(b)).l2() / b.l2() < 1e-12);
    ComplexForm c = random_form(g, 1, 1, rng);
    CHECK((del(delbar(c)) + delbar(del(c))).l2() / c.l2() < 1e-12);

    ComplexForm u = random_form(g, 1, 1, rng);
    ComplexForm v = random_form(g, 1, 0, rng);
    ComplexForm lhs = delbar(wedge(u, v));
    ComplexForm rhs = wedge(delbar(u), v) + wedge(u, delbar(v)); // |u| even
    CHECK((lhs - rhs).l2() / std::max(lhs.l2(), 1e-300) < 1e-10);
}

TEST_CASE("d of a constant form vanishes") {
    auto g = grid8();
    ComplexForm w1 = flat_kahler_form(g);
    CHECK(d(w1).l2() == 0.0);
}

TEST_CASE("conjugation intertwines del and delbar") {
    auto g = grid8();
    Rng rng(11);
    ComplexForm a = random_form(g, 0, 1, rng);
    ComplexForm lhs = delbar(a.conjugate());
    ComplexForm rhs = del(a).conjugate();
    CHECK((lhs - rhs).l2() / std::max(lhs.l2(), 1e-300) < 1e-13);
}

TEST_CASE("single-mode del oracle") {
    // del(e^{2 pi i x1} dzb1^dzb2) = pi i e^{2 pi i x1} dz1^dzb1^dzb2
    auto g = grid8();
    ComplexForm f(g, 0, 2);
    int k[4] = {1, 0, 0, 0};
    f.comp(0, 3) = ScalarField::mode(g, k, 1.0);
    ComplexForm df = del(f);
    cplx got = df.comp(1, 3).hat()[g->flat(1, 0, 0, 0)];
    CHECK(std::abs(got - cplx(0.0, kPi)) < 1e-14);
    CHECK(df.comp(2, 3).l2() < 1e-15);
}

TEST_CASE("paper identity: 1/2 i_sigma(wI ^ wI) = -1/4 conj(Omega)") {
    auto g = grid8();
    Bivector sigma(g, 1.0); // inverse of dz1^dz2
    ComplexForm wI = flat_kahler_form(g);
    ComplexForm chi = contract_sigma_pair(sigma, wI, wI);
    CHECK(std::abs(chi.comp(0, 3).hat()[0] - cplx(-0.25, 0.0)) < 1e-15);
    double off = chi.l2() * chi.l2() - std::norm(chi.comp(0, 3).hat()[0]);
    CHECK(std::abs(off) < 1e-28);
}

TEST_CASE("contract_sigma_pair: zero sigma, symmetry, single-mode oracle") {
    auto g = grid8();
    Rng rng(13);
    ComplexForm a = random_form(g, 1, 1, rng);
    ComplexForm b = random_form(g, 1, 1, rng);
    Bivector zero(g, 0.0);
    CHECK(contract_sigma_pair(zero, a, b).l2() == 0.0);
    Bivector sigma(g, cplx(0.7, 0.2));
    ComplexForm s1 = contract_sigma_pair(sigma, a, b);
    ComplexForm s2 = contract_sigma_pair(sigma, b, a);
    CHECK((s1 - s2).l2() / std::max(s1.l2(), 1e-300) < 1e-13);

    // single-mode by-hand value: w = e^{2 pi i x1} dz1^dzb1, w' = dz2^dzb2
    ComplexForm u(g, 1, 1), v(g, 1, 1);
    int k[4] = {1, 0, 0, 0};
    u.comp(1, 1) = ScalarField::mode(g, k, cplx(2.0, 1.0));
    v.comp(2, 2) = ScalarField::constant(g, cplx(0.0, 3.0));
    Bivector sc(g, 2.0);
    // chi = (f/2)(u_{11} v_{22}) = (2/2) * (2+i) e^{..} * 3i
    ComplexForm chi = contract_sigma_pair(sc, u, v);
    cplx got = chi.comp(0, 3).hat()[g->flat(1, 0, 0, 0)];
    CHECK(std::abs(got - cplx(2.0, 1.0) * cplx(0.0, 3.0)) < 1e-13);
}

TEST_CASE("phi_from: flat pattern, linearity, zero sigma") {
    auto g = grid8();
    ComplexForm w1 = flat_kahler_form(g);
    Bivector sigma(g, 1.0);
    EndoField e = phi_from(sigma, w1);
    CHECK(std::abs(e.entry(0, 1).hat()[0] - cplx(0.0, 0.5)) < 1e-15);
    CHECK(std::abs(e.entry(1, 0).hat()[0] - cplx(0.0, -0.5)) < 1e-15);
    CHECK(e.entry(0, 0).l2() + e.entry(1, 1).l2() < 1e-15);

    Rng rng(17);
    ComplexForm a = random_form(g, 1, 1, rng), b = random_form(g, 1, 1, rng);
    EndoField ea = phi_from(sigma, a), eb = phi_from(sigma, b), eab = phi_from(sigma, a + b);
    double err = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k)
            err = std::max(err, (eab.entry(i, k) - ea.entry(i, k) - eb.entry(i, k)).l2());
    CHECK(err < 1e-13);
    Bivector zero(g, 0.0);
    CHECK(phi_from(zero, a).l2() == 0.0);
}

TEST_CASE("mc_bracket: symmetry, constants, single-mode oracle") {
    auto g = grid8();
    Rng rng(19);
    auto rand_endo = [&] {
        EndoField e(g);
        for (int i = 0; i < 2; ++i)
            for (int k = 0; k < 2; ++k)
                e.entry(i, k) = random_field(g, rng, 2, 4);
        return e;
    };
    EndoField p1 = rand_endo(), p2 = rand_endo();
    VectorValued02 b12 = mc_bracket(p1, p2), b21 = mc_bracket(p2, p1);
    CHECK((b12.v1 - b21.v1).l2() + (b12.v2 - b21.v2).l2() < 1e-12 * std::max(1.0, b12.l2()));

    EndoField c(g);
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k)
            c.entry(i, k) = ScalarField::constant(g, rng.cnormal());
    CHECK(mc_bracket(c, c).l2() == 0.0);

    // one-mode oracle: phi with only phi^1_1 = e^{2 pi i x1}, psi with only
    // psi^2_2 = e^{2 pi i x3}; [phi,psi]^2_{12} = phi^1_1 d_1 psi^2_2
    EndoField phi(g), psi(g);
    int k1[4] = {1, 0, 0, 0}, k2[4] = {0, 0, 1, 0};
    phi.entry(0, 0) = ScalarField::mode(g, k1, 1.0);
    psi.entry(1, 1) = ScalarField::mode(g, k2, 1.0);
    VectorValued02 br = mc_bracket(phi, psi);
    // d/dz1 e^{2 pi i x3} = 0; d/dz1 acts on z1 only: expected value
    // [phi,psi]^2_{12} = phi^1_1 * (d_1 psi^2_2) = e^{2pi i x1} * 0 = 0
    CHECK(br.v2.l2() < 1e-14);
    // swap axes so the derivative bites: psi^2_2 = e^{2 pi i x1}
    EndoField psi2(g);
    psi2.entry(1, 1) = ScalarField::mode(g, k1, 1.0);
    VectorValued02 br2 = mc_bracket(phi, psi2);
    cplx got = br2.v2.hat()[g->flat(2, 0, 0, 0)];
    CHECK(std::abs(got - cplx(0.0, kPi)) < 1e-13); // e^{..} * pi i e^{..}
}

TEST_CASE("norms: zero, constants, single-mode sobolev weight") {
    auto g = grid8();
    ComplexForm z(g, 1, 1);
    FormNorms n0 = norms(z, 3.0);
    CHECK(n0.l2 == 0.0);
    CHECK(n0.sup == 0.0);
    CHECK(n0.sobolev_s == 0.0);

    ComplexForm c(g, 0, 0);
    c.comp(0, 0) = ScalarField::constant(g, 1.0);
    FormNorms n1 = norms(c, 3.0);
    CHECK(n1.l2 == doctest::Approx(1.0));
    CHECK(n1.sup == doctest::Approx(1.0));
    CHECK(n1.sobolev_s == doctest::Approx(1.0));

    // e^{2 pi i x1}: |k|^2 = 1, weight (1+1)^{s/2} -> 2^{3/2} at s = 3
    ComplexForm m(g, 0, 0);
    int k[4] = {1, 0, 0, 0};
    m.comp(0, 0) = ScalarField::mode(g, k, 1.0);
    CHECK(norms(m, 3.0).sobolev_s == doctest::Approx(std::pow(2.0, 1.5)));
}

TEST_CASE("bivector: holomorphy residual and constancy") {
    auto g = grid8();
    Bivector c(g, cplx(2.0, -1.0));
    CHECK(c.is_constant());
    CHECK(c.holomorphy_residual() == 0.0);
    Rng rng(23);
    Bivector f(random_field(g, rng, 2, 4));
    CHECK(!f.is_constant());
    CHECK(f.holomorphy_residual() > 1e-3);
}

TEST_CASE("form serialization round trip") {
    auto g = grid8();
    Rng rng(29);
    ComplexForm a = random_form(g, 1, 1, rng);
    std::string path = "test_form_roundtrip.hktf";
    a.save(path);
    ComplexForm b = ComplexForm::load(path, g);
    CHECK((a - b).l2() == 0.0);
    CHECK(b.p() == 1);
    CHECK(b.q() == 1);
    std::remove(path.c_str());
}

TEST_CASE("conjugation swaps bidegree and is an involution on (1,1)") {
    auto g = grid8();
    Rng rng(31);
    ComplexForm a = random_form(g, 2, 0, rng);
    ComplexForm ca = a.conjugate();
    CHECK(ca.p() == 0);
    CHECK(ca.q() == 2);
    ComplexForm cca = ca.conjugate();
    CHECK((cca - a).l2() / a.l2() < 1e-14);
    ComplexForm w1 = flat_kahler_form(g);
    CHECK((w1.conjugate() - w1).l2() < 1e-15);
}
