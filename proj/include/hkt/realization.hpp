#pragma once

#include <Eigen/Dense>

#include <memory>
#include <optional>

#include "hkt/deformation.hpp"

namespace hkt {

using Mat8 = Eigen::Matrix<cplx, 8, 8>;
using Mat4 = Eigen::Matrix<cplx, 4, 4>;
using Mat2 = Eigen::Matrix<cplx, 2, 2>;
using Mat48 = Eigen::Matrix<cplx, 4, 8>;
using Mat84 = Eigen::Matrix<cplx, 8, 4>;
using Vec8r = Eigen::Matrix<double, 8, 1>;

enum class ModelKind { Cotangent, PairGroupoid };

// (1,1)-form with component matrix w[j][k] (coeff of dz^{j+1} ^ dzbar^{k+1})
// as a 4x4 matrix over the X-basis (d/dz1, d/dz2, d/dzbar1, d/dzbar2)
Mat4 x_form_11(const Mat2& w);
Mat4 x_form_20(cplx c); // c dz1^dz2
Mat4 x_form_02(cplx c); // c dzbar1^dzbar2

// 2-form as a map T -> T*: v |-> w(v, .) which is W^T v
template <typename M>
M form_map(const M& W) {
    return W.transpose();
}

// Explicit symplectic realization over the torus.
//
// Cotangent (sigma = 0): M = T*X, basis (dz1, dz2, dp1, dp2 | conj),
//   Omega0 = dp1^dz1 + dp2^dz2, s = t = pi, iota = zero section.
// PairGroupoid (sigma nondegenerate): M = X x X, basis holo-first
//   (dz1^s, dz2^s, dz1^t, dz2^t | conj), Omega0 = pr_s^* Omega - pr_t^* Omega
//   with Omega = sigma^{-1} = (1/f) dz1^dz2; s, t the projections,
//   iota the diagonal.
//
// Points carry 8 real coordinates: cotangent (x1..x4, Re p1, Im p1, Re p2,
// Im p2); pair groupoid (x1..x4, y1..y4).
class RealizationModel {
public:
    RealizationModel(ModelKind kind, std::shared_ptr<const Kahler> K, Bivector sigma,
                     double p_max = 1.0);

    ModelKind kind() const { return kind_; }
    const Kahler& kahler() const { return *K_; }
    const Bivector& sigma() const { return sigma_; }
    double p_max() const { return p_max_; }

    const Mat8& Omega0() const { return Omega0_; }
    const Mat48& s_star() const { return S_; }  // pushforward ds
    const Mat48& t_star() const { return T_; }
    const Mat84& d_iota() const { return dI_; }
    const Mat8& conj_swap() const { return SM_; }     // conjugation basis swap on T_C M
    const Mat84& t01_basis() const { return T01_; }   // columns span T^{0,1} M
    const Mat8& tau() const { return tau_; }          // holomorphic Poisson inverse of Omega0
    Mat4 sigma_map() const;                           // sigma as map T*X -> TX

    // complexified components of the real coordinate basis of T M
    const Mat8& real_to_complex() const { return C_; }

    // base points of s and t for a given M-point
    void base_points(const Vec8r& pt, double xs[4], double xt[4]) const;

    // random M-point with base coordinates on the grid
    Vec8r random_point(Rng& rng, bool on_grid = true) const;

    // structural identities at build time: s o iota = id, t o iota = id,
    // iota Lagrangian; throws on violation
    void validate() const;

private:
    ModelKind kind_;
    std::shared_ptr<const Kahler> K_;
    Bivector sigma_;
    double p_max_;
    Mat8 Omega0_, SM_, tau_, C_;
    Mat48 S_, T_;
    Mat84 dI_, T01_;
};

// Two-parameter family Omega_{z1,z2} = Omega0 + s^* beta(z1) - t^* beta(z2).
// The series provides beta; for sigma = 0 without higher orders this is
// Omega0 + 2 i z pi^* omega1 on the anti-diagonal.
class LiftedFamily {
public:
    LiftedFamily(std::shared_ptr<const RealizationModel> model,
                 std::shared_ptr<const DeformationSeries> series);

    const RealizationModel& model() const { return *model_; }
    const DeformationSeries& series() const { return *series_; }

    // beta(z) at torus point x: (1,1) component matrix and (0,2) coefficient
    void beta_values(cplx z, const double x[4], Mat2& w11, cplx& chi02) const;
    // omega(z) (1,1) values only
    Mat2 omega_values(cplx z, const double x[4]) const;
    Mat2 omega1_values(const double x[4]) const;

    Mat8 omega_matrix(cplx z1, cplx z2, const Vec8r& pt) const;
    Mat8 eta_matrix(cplx z1, cplx z2, const Vec8r& pt) const;   // s^*w(z1) - t^*w(z2)
    Mat4 phi_matrix(cplx z, const double x[4]) const;           // -sigma o omega(z), X-level

    double radius() const { return radius_; }

private:
    std::shared_ptr<const RealizationModel> model_;
    std::shared_ptr<const DeformationSeries> series_;
    double radius_;
    // physical copies for fast evaluation
    struct Sample {
        std::vector<std::vector<cplx>> omega_comps; // per order: 4 fields (phys)
        std::vector<std::vector<cplx>> gamma_comp;  // per order >= 2: 1 field
    };
    Sample phys_;
    friend class FamilySampler;
};

struct DualPairResiduals {
    double s_tau_s = 0.0; // |s tau s^* - sigma|
    double t_tau_t = 0.0; // |t tau t^* + sigma|
    double s_tau_t = 0.0;
    double t_tau_s = 0.0;
    double max() const { return std::max({s_tau_s, t_tau_t, s_tau_t, t_tau_s}); }
};
DualPairResiduals dual_pair_relations(const RealizationModel& m);

struct KernelCheck {
    int dim = -1;                 // -1 when indeterminate
    bool indeterminate = false;
    double gap = 0.0;             // s4 / s5 (sorted descending)
    double formula_residual = 0.0; // |Omega (1 + psi) v| over T01 basis
    Eigen::Matrix<cplx, 8, 4> basis;
};
KernelCheck kernel_check(const LiftedFamily& f, cplx z1, cplx z2, const Vec8r& pt,
                         double gap_threshold = 1e3);

struct TransversalityCheck {
    double margin = 0.0;           // sin of smallest principal angle ker vs conj(ker)
    double psi_identity_s = 0.0;   // |s(1 - psi psibar) - (1 - phi1 phibar1) s|
    double psi_identity_t = 0.0;
};
TransversalityCheck reality_transversality(const LiftedFamily& f, cplx z1, cplx z2, const Vec8r& pt);

struct AlmostComplexResult {
    Eigen::Matrix<double, 8, 8> I;
    double i_square_residual = 0.0;
    double imag_residual = 0.0; // imaginary part left after realification
};
AlmostComplexResult almost_complex(const LiftedFamily& f, cplx z1, cplx z2, const Vec8r& pt);

// max |N^k_{ij}| of the Nijenhuis tensor of the I field at pt, by central
// differences of step h over the real coordinates
double nijenhuis_residual(const LiftedFamily& f, cplx z1, cplx z2, const Vec8r& pt, double h);

// max over points and zetas of |iota^* Omega_{iz,-iz} - 2 i z omega1| / |z|
double antidiagonal_pullback_residual(const LiftedFamily& f, const std::vector<cplx>& zetas,
                                      const std::vector<Vec8r>& base_points);

// |iota^* Omega_{z1,z2} - (beta(z1) - beta(z2))| at a base point
double bisection_identity_residual(const LiftedFamily& f, cplx z1, cplx z2, const Vec8r& base_pt);

// finite-difference d Omega at pt (all coordinate triples), max residual
double closedness_fd_residual(const LiftedFamily& f, cplx z1, cplx z2, const Vec8r& pt, double h);

} // namespace hkt
