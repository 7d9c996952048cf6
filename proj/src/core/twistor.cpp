#include "hkt/twistor.hpp"

#include <stdexcept>

namespace hkt {

namespace {

Mat4d wedge2(int i, int j) {
    Mat4d W = Mat4d::Zero();
    W(i, j) = 1.0;
    W(j, i) = -1.0;
    return W;
}

Mat4d flat_wI() { return wedge2(0, 1) + wedge2(2, 3); }
Mat4d flat_wJ() { return wedge2(0, 2) - wedge2(1, 3); }
Mat4d flat_wK() { return wedge2(0, 3) + wedge2(1, 2); }

} // namespace

QuadraticTwistorFamily QuadraticTwistorFamily::flat() {
    Mat4c A = flat_wJ().cast<cplx>() + cplx(0.0, 1.0) * flat_wK().cast<cplx>();
    Mat4d B = flat_wI();
    return {[A](const Vec8r&) { return A; }, [B](const Vec8r&) { return B; }};
}

QuadraticTwistorFamily QuadraticTwistorFamily::flat_pseudo() {
    Mat4c A = flat_wJ().cast<cplx>() + cplx(0.0, 1.0) * flat_wK().cast<cplx>();
    Mat4d B = wedge2(0, 1) - wedge2(2, 3);
    return {[A](const Vec8r&) { return A; }, [B](const Vec8r&) { return B; }};
}

QuadraticTwistorFamily QuadraticTwistorFamily::congruence(
    std::function<Eigen::Matrix4d(const Vec8r&)> P) {
    Mat4c A0 = flat_wJ().cast<cplx>() + cplx(0.0, 1.0) * flat_wK().cast<cplx>();
    Mat4d B0 = flat_wI();
    return {[A0, P](const Vec8r& pt) -> Mat4c {
                Eigen::Matrix4d Pm = P(pt);
                return Pm.transpose().cast<cplx>() * A0 * Pm.cast<cplx>();
            },
            [B0, P](const Vec8r& pt) -> Mat4d {
                Eigen::Matrix4d Pm = P(pt);
                return Pm.transpose() * B0 * Pm;
            }};
}

Mat4d complex_structure_from(const Mat4c& W) {
    Mat4d re = W.real(), im = W.imag();
    Eigen::FullPivLU<Mat4d> lu(im);
    if (!lu.isInvertible())
        throw std::runtime_error("complex_structure_from: imaginary part singular");
    return lu.solve(re);
}

HyperkahlerTriple triple_from_family(const QuadraticTwistorFamily& fam, const Vec8r& pt) {
    HyperkahlerTriple t;
    Mat4c A = fam.A(pt);
    t.omega_J = A.real();
    t.omega_K = A.imag();
    t.omega_I = fam.B(pt);
    t.I = complex_structure_from(A);
    t.J = complex_structure_from(fam.at(cplx(0.0, 1.0), pt));
    t.K = -complex_structure_from(fam.at(cplx(1.0, 0.0), pt));
    // orientation: require IJK = -1, flipping K if the extraction landed on +1
    Mat4d ijk = t.I * t.J * t.K;
    if ((ijk + Mat4d::Identity()).cwiseAbs().maxCoeff() >
        (ijk - Mat4d::Identity()).cwiseAbs().maxCoeff())
        t.K = -t.K;
    auto dev = [](const Mat4d& M) { return (M + Mat4d::Identity()).cwiseAbs().maxCoeff(); };
    t.quaternion_residual = std::max({dev(t.I * t.I), dev(t.J * t.J), dev(t.K * t.K),
                                      dev(t.I * t.J * t.K)});
    // g = omega_I(., I.)
    t.g = t.omega_I * t.I;
    Mat4d gJ = t.omega_J * t.J;
    Mat4d gK = t.omega_K * t.K;
    t.metric_consistency = std::max((t.g - gJ).cwiseAbs().maxCoeff(), (t.g - gK).cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Mat4d> es((t.g + t.g.transpose()) / 2.0);
    for (int i = 0; i < 4; ++i)
        (es.eigenvalues()(i) > 0 ? t.signature_positive : t.signature_negative)++;
    return t;
}

double real_structure_identity(const QuadraticTwistorFamily& fam, double eps,
                               const std::vector<cplx>& zs, const Vec8r& pt) {
    RealStructureParams rs{eps};
    double worst = 0.0;
    for (cplx z : zs) {
        if (std::abs(z) == 0.0)
            throw std::invalid_argument("real_structure_identity: z = 0 excluded");
        Mat4c lhs = fam.at(rs.rho(z), pt, eps).conjugate();
        Mat4c rhs = (eps * eps / (z * z)) * fam.at(z, pt, eps);
        worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
    }
    return worst;
}

double real_structure_lagrangian_identity(double eps, const std::vector<cplx>& zs) {
    RealStructureParams rs{eps};
    double worst = 0.0;
    const cplx iu(0.0, 1.0);
    for (cplx z : zs) {
        cplx lhs = std::conj(2.0 * iu * rs.rho(z));
        cplx rhs = (eps * eps / (z * z)) * (2.0 * iu * z);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

double s1_equivariance_residual(const LiftedFamily& f, const std::vector<cplx>& lambdas,
                                const std::vector<cplx>& zs, const std::vector<Vec8r>& pts) {
    if (f.model().kind() != ModelKind::Cotangent)
        throw std::invalid_argument("s1_equivariance: cotangent model required");
    const cplx iu(0.0, 1.0);
    double worst = 0.0;
    for (const auto& pt : pts)
        for (cplx lam : lambdas)
            for (cplx z : zs) {
                Mat8 D = Mat8::Zero();
                D(0, 0) = D(1, 1) = 1.0;
                D(2, 2) = D(3, 3) = lam;
                D(4, 4) = D(5, 5) = 1.0;
                D(6, 6) = D(7, 7) = std::conj(lam);
                // psi_lambda fixes the base point, so Omega may be evaluated at pt
                Mat8 lhs = D.transpose() * f.omega_matrix(iu * z, -iu * z, pt) * D;
                Mat8 rhs = lam * f.omega_matrix(iu * z / lam, -iu * z / lam, pt);
                worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
            }
    return worst;
}

TheoremAHypothesis theorem_a_hypothesis_check(const std::function<Mat8(cplx)>& family,
                                              const Mat84& d_iota, const Mat4& omega_mat, int N,
                                              double r0, int samples) {
    TheoremAHypothesis out;
    const cplx iu(0.0, 1.0);
    const double two_pi = 6.28318530717958647692;
    std::vector<Mat8> vals;
    vals.reserve(static_cast<std::size_t>(samples));
    double scale = 0.0;
    for (int s = 0; s < samples; ++s) {
        cplx z = r0 * std::exp(iu * (two_pi * s / samples));
        Mat8 W = family(z);
        scale = std::max(scale, W.cwiseAbs().maxCoeff());
        Mat4 pulled = d_iota.transpose() * W * d_iota;
        out.pullback_residual = std::max(
            out.pullback_residual, (pulled - 2.0 * iu * z * omega_mat).cwiseAbs().maxCoeff() / std::abs(z));
        vals.push_back(W);
    }
    // discrete Fourier coefficients over the circle; content beyond degree N
    // (negative frequencies and > N) should vanish for a polynomial family.
    // Residual is relative to the family scale at the sampled radius.
    double bad = 0.0;
    for (int kf = 0; kf < samples; ++kf) {
        int freq = kf <= samples / 2 ? kf : kf - samples;
        if (freq >= 0 && freq <= N)
            continue;
        Mat8 acc = Mat8::Zero();
        for (int s = 0; s < samples; ++s)
            acc += vals[static_cast<std::size_t>(s)] *
                   std::exp(-iu * (two_pi * kf * s / samples));
        acc /= static_cast<double>(samples);
        bad = std::max(bad, acc.cwiseAbs().maxCoeff());
    }
    out.polynomial_residual = bad / std::max(scale, 1e-300);
    return out;
}

} // namespace hkt
