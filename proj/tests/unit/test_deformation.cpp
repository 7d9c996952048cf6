#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hkt/deformation.hpp"

#include <Eigen/Dense>

#include <cmath>

using namespace hkt;

namespace {

const double kPi = 3.14159265358979323846;

std::shared_ptr<const Kahler> generic_kahler(int n = 16) {
    std::vector<RhoMode> modes = {
        {{1, 0, 0, 0}, 0.010},
        {{0, 0, 1, 0}, 0.008},
        {{1, 0, 1, 0}, 0.006},
        {{0, 1, -1, 0}, 0.004},
    };
    return std::make_shared<Kahler>(std::make_shared<Grid>(n), modes);
}

// Independent oracle for the n = 2 coefficient with rho = amp cos(2 pi x1):
// every field in the chain depends on x1 alone, so the problem reduces to the
// x1 circle, assembled densely and solved by LU -- a different algorithm and
// code path from the 4D FFT + CG pipeline.
Eigen::VectorXcd omega2_oracle_1d(int n, double amp) {
    using VXc = Eigen::VectorXcd;
    using MXc = Eigen::MatrixXcd;
    VXc h11(n), gam(n);
    for (int i = 0; i < n; ++i) {
        double x = double(i) / n;
        h11(i) = 1.0 - 2.0 * kPi * kPi * amp * std::cos(2.0 * kPi * x);
        gam(i) = -0.25 * h11(i);
    }
    MXc F(n, n), Fi(n, n);
    const cplx iu(0.0, 1.0);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            F(a, b) = std::exp(-2.0 * kPi * iu * double(a * b) / double(n)) / double(n);
            Fi(a, b) = std::exp(2.0 * kPi * iu * double(a * b) / double(n));
        }
    VXc sym(n);
    for (int a = 0; a < n; ++a) {
        int f = a <= n / 2 - 1 ? a : a - n;
        sym(a) = 2.0 * kPi * iu * double(f);
    }
    MXc dz = 0.5 * (Fi * sym.asDiagonal() * F); // d/dz1 on x1-only fields
    MXc winv = MXc::Zero(n, n);
    for (int i = 0; i < n; ++i)
        winv(i, i) = -2.0 / h11(i);
    MXc lap = dz * winv * dz;
    VXc b = gam;
    b.array() -= gam.mean();
    VXc u = lap.completeOrthogonalDecomposition().solve(b);
    u.array() -= u.mean();
    return dz * winv * dz * u; // physical values of the (1, 2bar) component
}

} // namespace

TEST_CASE("recursion source vanishes: sigma = 0, and flat metric with constant sigma") {
    auto g = std::make_shared<Grid>(16);
    auto Kf = std::make_shared<Kahler>(g);
    DeformationSeries s0 = hitchin_series(Bivector(g, 0.0), Kf, 4);
    for (int n = 2; n <= 4; ++n)
        CHECK(s0.omega(n).l2() == 0.0);
    CHECK(std::isinf(radius_estimate(s0).radius));

    DeformationSeries sc = hitchin_series(Bivector(g, 1.0), Kf, 4);
    for (int n = 2; n <= 4; ++n)
        CHECK(sc.omega(n).l2() == 0.0);
}

TEST_CASE("omega_2 matches the independent 1D oracle (rho = 0.05 cos 2 pi x1)") {
    int n = 16;
    double amp = 0.05;
    auto g = std::make_shared<Grid>(n);
    auto K = std::make_shared<Kahler>(g, std::vector<RhoMode>{{{1, 0, 0, 0}, amp}});
    DeformationSeries s = hitchin_series(Bivector(g, 1.0), K, 2, 1e-13, 4000);
    const ComplexForm& w2 = s.omega(2);

    // frozen value computed with the oracle below: the only nonzero component
    // is (1, 2bar), spectrum at k1 = +-1 with coefficient pi^2 amp / 4
    // (dz1 = dzbar1 on x1-only fields, so the output equals the deflated
    // source gamma - H gamma relabelled as a (1,1)-form)
    const double frozen = 0.12337005501361598;
    CHECK(std::abs(w2.comp(1, 2).hat()[g->flat(1, 0, 0, 0)] - cplx(frozen, 0.0)) < 1e-10);
    CHECK(std::abs(w2.comp(1, 2).hat()[g->flat(n - 1, 0, 0, 0)] - cplx(frozen, 0.0)) < 1e-10);
    double others = w2.comp(1, 1).l2() + w2.comp(2, 1).l2() + w2.comp(2, 2).l2();
    CHECK(others < 1e-10);

    // live oracle agreement along the x1 axis
    Eigen::VectorXcd oracle = omega2_oracle_1d(n, amp);
    auto phys = w2.comp(1, 2).to_physical();
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        worst = std::max(worst, std::abs(phys[g->flat(i, 0, 0, 0)] - oracle(i)));
    CHECK(worst < 1e-10);
    // and the oracle itself reproduces the frozen coefficient
    const cplx iu(0.0, 1.0);
    cplx c1(0.0, 0.0);
    for (int i = 0; i < n; ++i)
        c1 += oracle(i) * std::exp(-2.0 * kPi * iu * double(i) / double(n));
    c1 /= double(n);
    CHECK(std::abs(c1 - cplx(frozen, 0.0)) < 1e-12);
}

TEST_CASE("generic series: per-order residuals, odd vanishing, beta closedness") {
    auto K = generic_kahler();
    DeformationSeries s = hitchin_series(Bivector(K->grid_ptr(), 1.0), K, 8, 1e-13, 2000);
    for (const auto& d : s.diag) {
        CHECK(d.eq_residual < 1e-8);
        CHECK(d.del_residual < 1e-12);
        CHECK(d.dbar_star_residual < 1e-7);
        CHECK(d.lefschetz_residual < 1e-10);
    }
    OddVanishingReport odd = odd_vanishing_check(s);
    CHECK(odd.max_odd_norm < 1e-10);
    CHECK(odd.max_even_contract_norm < 1e-10);
    CHECK(odd.pass(1e-10));

    BetaClosedness bc = beta_closedness(s);
    CHECK(bc.max_del < 1e-8);
    CHECK(bc.max_mixed < 1e-8);

    // negative control: injecting a fake omega_3 must trip the detector
    DeformationSeries tampered = s;
    ComplexForm bad(K->grid_ptr(), 1, 1);
    bad.comp(1, 1) = ScalarField::constant(K->grid_ptr(), 0.01);
    tampered.inject_omega(3, bad);
    CHECK(!odd_vanishing_check(tampered).pass(1e-10));
}

TEST_CASE("flat hyperkahler beta: beta(z) = z wI - z^2/4 conj(Omega)") {
    auto g = std::make_shared<Grid>(16);
    auto Kf = std::make_shared<Kahler>(g);
    DeformationSeries s = hitchin_series(Bivector(g, 1.0), Kf, 4);
    auto [b1_11, b1_02] = s.beta(1);
    CHECK((b1_11 - Kf->omega1()).l2() < 1e-14);
    CHECK(b1_02.l2() == 0.0);
    auto [b2_11, b2_02] = s.beta(2);
    CHECK(b2_11.l2() == 0.0);
    CHECK(std::abs(b2_02.comp(0, 3).hat()[0] - cplx(-0.25, 0.0)) < 1e-14);
    for (int n = 3; n <= 4; ++n) {
        auto [bn_11, bn_02] = s.beta(n);
        CHECK(bn_11.l2() + bn_02.l2() < 1e-14);
    }
    // sigma = 0: beta(z) = z omega1 and nothing else
    DeformationSeries s0 = hitchin_series(Bivector(g, 0.0), Kf, 3);
    auto [c2_11, c2_02] = s0.beta(2);
    CHECK(c2_11.l2() + c2_02.l2() == 0.0);
}

TEST_CASE("scaling covariance: seed t omega1 maps omega_n to t^n omega_n") {
    auto K = generic_kahler();
    auto g = K->grid_ptr();
    Bivector sigma(g, 1.0);
    DeformationSeries s1(sigma, K, 4, K->omega1());
    s1.build();
    double t = 0.7;
    DeformationSeries st(sigma, K, 4, cplx(t, 0.0) * K->omega1());
    st.build();
    for (int n = 2; n <= 4; ++n) {
        double tn = std::pow(t, n);
        // odd coefficients are numerically zero, so allow a small absolute floor
        double abs_err = (st.omega(n) - cplx(tn, 0.0) * s1.omega(n)).l2();
        CHECK(abs_err < 1e-10 * tn * s1.omega(n).l2() + 1e-12);
    }
}

TEST_CASE("mc_residual: zero at zeta = 0 and for sigma = 0; ratio 2^{N+1} at odd N") {
    auto K = generic_kahler();
    auto g = K->grid_ptr();
    DeformationSeries s0 = hitchin_series(Bivector(g, 0.0), K, 3);
    CHECK(mc_residual(s0, cplx(0.3, 0.1)) < 1e-13);

    DeformationSeries s = hitchin_series(Bivector(g, 1.0), K, 5, 1e-13, 2000);
    CHECK(mc_residual(s, cplx(0.0, 0.0)) == 0.0);
    RadiusEstimate re = radius_estimate(s);
    double z = re.radius / 4.0;
    double r1 = mc_residual(s, cplx(z, 0.0));
    double r2 = mc_residual(s, cplx(z / 2.0, 0.0));
    CHECK(r1 / r2 == doctest::Approx(std::pow(2.0, 6)).epsilon(0.25));
}

TEST_CASE("mc order sweep: slope N+1 over [r/32, r/2] at odd N") {
    auto K = generic_kahler();
    DeformationSeries s = hitchin_series(Bivector(K->grid_ptr(), 1.0), K, 5, 1e-13, 2000);
    RadiusEstimate re = radius_estimate(s);
    McSweep sw = mc_order_sweep(s, re.radius / 32.0, re.radius / 2.0, 9);
    CHECK(std::abs(sw.slope - 6.0) < 0.3);
}

TEST_CASE("radius estimate: catalan numbers and the bound") {
    CHECK(catalan_number(0) == doctest::Approx(1.0));
    CHECK(catalan_number(1) == doctest::Approx(1.0));
    CHECK(catalan_number(2) == doctest::Approx(2.0));
    CHECK(catalan_number(3) == doctest::Approx(5.0));
    CHECK(catalan_number(4) == doctest::Approx(14.0));
    CHECK(catalan_number(5) == doctest::Approx(42.0));

    auto K = generic_kahler();
    DeformationSeries s = hitchin_series(Bivector(K->grid_ptr(), 1.0), K, 8, 1e-13, 2000);
    RadiusEstimate re = radius_estimate(s);
    CHECK(re.radius > 0.0);
    CHECK(std::isfinite(re.radius));
    CHECK(re.catalan_ok);
    CHECK(re.radius == doctest::Approx(1.0 / (4.0 * re.c_est * re.a[1])));
}

TEST_CASE("invertibility margin: 1 at zeta = 0; 1 + |z|^2/4 on the flat model") {
    auto g = std::make_shared<Grid>(16);
    auto Kf = std::make_shared<Kahler>(g);
    Rng rng(7);
    DeformationSeries s0 = hitchin_series(Bivector(g, 0.0), Kf, 2);
    CHECK(invertibility_margin(s0, cplx(0.4, 0.1), 20, rng) == doctest::Approx(1.0));

    DeformationSeries s = hitchin_series(Bivector(g, 1.0), Kf, 2);
    CHECK(invertibility_margin(s, cplx(0.0, 0.0), 20, rng) == doctest::Approx(1.0));
    cplx z(0.3, 0.2);
    double expect = 1.0 + std::norm(z) / 4.0;
    CHECK(invertibility_margin(s, z, 20, rng) == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("series termination for a single-direction perturbation") {
    // rho depending on x1 alone: omega(z) = z w1 + z^2 w2 exactly; the
    // order-4 source omega_2 ^ omega_2 has no volume part and higher orders
    // vanish identically
    auto g = std::make_shared<Grid>(16);
    auto K = std::make_shared<Kahler>(g, std::vector<RhoMode>{{{1, 0, 0, 0}, 0.03}});
    DeformationSeries s = hitchin_series(Bivector(g, 1.0), K, 6, 1e-13, 2000);
    CHECK(s.omega(2).l2() > 1e-3);
    for (int n = 3; n <= 6; ++n)
        CHECK(s.omega(n).l2() < 1e-11);
}
