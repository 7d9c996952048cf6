#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

#include "hkt/realization.hpp"

namespace hkt {

using Mat4d = Eigen::Matrix4d;
using Mat4c = Eigen::Matrix4cd;

// Quadratic pencil Omega_z = A + 2 i z B + z^2 conj(A) at a point, with
// A = omega_J + i omega_K and B = omega_I as real-coordinate 4x4 matrices.
// For eps != 1 the half-space normalization is
//   Omega^(eps)_z = eps A + 2 i z B + (z^2/eps) conj(A),
// which satisfies conj(Omega_{rho_eps(z)}) = (eps^2/z^2) Omega_z with the
// trivial real structure on points.
struct QuadraticTwistorFamily {
    std::function<Mat4c(const Vec8r&)> A;
    std::function<Mat4d(const Vec8r&)> B;

    Mat4c at(cplx z, const Vec8r& pt, double eps = 1.0) const {
        Mat4c a = A(pt);
        return eps * a + 2.0 * cplx(0.0, 1.0) * z * B(pt).cast<cplx>() + (z * z / eps) * a.conjugate();
    }

    static QuadraticTwistorFamily flat();        // A = dz1^dz2, B = flat omega_I
    static QuadraticTwistorFamily flat_pseudo(); // B = dx1^dx2 - dx3^dx4 (signature (1,1))
    // congruence transform X -> P(pt)^T X P(pt) of the flat family
    static QuadraticTwistorFamily congruence(std::function<Eigen::Matrix4d(const Vec8r&)> P);
};

// complex structure of a holomorphic symplectic matrix: I = (Im W)^{-1} (Re W);
// ker W is the -i eigenspace of I
Mat4d complex_structure_from(const Mat4c& W);

struct HyperkahlerTriple {
    Mat4d omega_I, omega_J, omega_K;
    Mat4d I, J, K, g;
    double quaternion_residual = 0.0; // max of |I^2+1|, |J^2+1|, |K^2+1|, |IJK+1|
    double metric_consistency = 0.0;  // pairwise disagreement of g from the three pairs
    int signature_positive = 0;       // eigenvalue counts of g
    int signature_negative = 0;
};

// omega_J = Re A, omega_K = Im A, omega_I = B; I from the z = 0 member,
// J from z = i, K from z = 1 (sign fixed by IJK = -1).
HyperkahlerTriple triple_from_family(const QuadraticTwistorFamily& fam, const Vec8r& pt);

// antipodal circle map rho_eps(z) = -eps^2 / conj(z)
struct RealStructureParams {
    double eps = 1.0;
    cplx rho(cplx z) const { return -eps * eps / std::conj(z); }
};

// max over samples near |z| = eps of |conj(Omega_{rho(z)}) - (eps^2/z^2) Omega_z|
double real_structure_identity(const QuadraticTwistorFamily& fam, double eps,
                               const std::vector<cplx>& zs, const Vec8r& pt);

// restriction to the Lagrangian: conj(2 i rho(z) w) = (eps^2/z^2)(2 i z w)
double real_structure_lagrangian_identity(double eps, const std::vector<cplx>& zs);

// S^1-equivariance of the cotangent family: psi_lambda^* Omega_z = lambda
// Omega_{z/lambda}; max residual over sampled lambda, z, points
double s1_equivariance_residual(const LiftedFamily& f, const std::vector<cplx>& lambdas,
                                const std::vector<cplx>& zs, const std::vector<Vec8r>& pts);

struct TheoremAHypothesis {
    double pullback_residual = 0.0;   // |iota^* Omega_z - 2 i z omega| / |z|
    double polynomial_residual = 0.0; // relative size of Fourier content beyond degree N
    bool pass(double tol) const { return pullback_residual < tol && polynomial_residual < tol; }
};
// family: z -> 8x8 matrix at a base point; omega: X-level (1,1) matrix at that
// point; checks iota^* Omega_z = 2 i z omega and polynomial dependence of
// degree <= N by sampling z on a circle of radius r0
TheoremAHypothesis theorem_a_hypothesis_check(const std::function<Mat8(cplx)>& family,
                                              const Mat84& d_iota, const Mat4& omega_mat, int N,
                                              double r0, int samples = 32);

} // namespace hkt
