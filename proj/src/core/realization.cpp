#include "hkt/realization.hpp"

#include <cmath>
#include <stdexcept>

namespace hkt {

Mat4 x_form_11(const Mat2& w) {
    Mat4 W = Mat4::Zero();
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
            W(j, 2 + k) = w(j, k);
            W(2 + k, j) = -w(j, k);
        }
    return W;
}

Mat4 x_form_20(cplx c) {
    Mat4 W = Mat4::Zero();
    W(0, 1) = c;
    W(1, 0) = -c;
    return W;
}

Mat4 x_form_02(cplx c) {
    Mat4 W = Mat4::Zero();
    W(2, 3) = c;
    W(3, 2) = -c;
    return W;
}

RealizationModel::RealizationModel(ModelKind kind, std::shared_ptr<const Kahler> K, Bivector sigma,
                                   double p_max)
    : kind_(kind), K_(std::move(K)), sigma_(std::move(sigma)), p_max_(p_max) {
    Omega0_ = Mat8::Zero();
    S_ = Mat48::Zero();
    T_ = Mat48::Zero();
    dI_ = Mat84::Zero();
    SM_ = Mat8::Zero();
    T01_ = Mat84::Zero();
    C_ = Mat8::Zero();
    if (kind_ == ModelKind::Cotangent) {
        // basis (dz1, dz2, dp1, dp2 | conj): Omega0 = dp1^dz1 + dp2^dz2
        for (int j = 0; j < 2; ++j) {
            Omega0_(2 + j, j) = 1.0;
            Omega0_(j, 2 + j) = -1.0;
        }
        S_(0, 0) = S_(1, 1) = 1.0;
        S_(2, 4) = S_(3, 5) = 1.0;
        T_ = S_;
        dI_(0, 0) = dI_(1, 1) = 1.0;
        dI_(4, 2) = dI_(5, 3) = 1.0;
        for (int j = 0; j < 4; ++j) {
            SM_(j, 4 + j) = 1.0;
            SM_(4 + j, j) = 1.0;
            T01_(4 + j, j) = 1.0;
        }
        // real coords (x1,x2,x3,x4, u1,v1,u2,v2), p_j = u_j + i v_j
        auto pair = [&](int row_h, int col_re) {
            C_(row_h, col_re) = 1.0;
            C_(row_h + 4, col_re) = 1.0;
            C_(row_h, col_re + 1) = cplx(0.0, 1.0);
            C_(row_h + 4, col_re + 1) = cplx(0.0, -1.0);
        };
        pair(0, 0); // x1, x2 -> dz1
        pair(1, 2); // x3, x4 -> dz2
        pair(2, 4); // u1, v1 -> dp1
        pair(3, 6); // u2, v2 -> dp2
    } else {
        if (!sigma_.is_constant() || std::abs(sigma_.constant_value()) == 0.0)
            throw std::invalid_argument("PairGroupoid: sigma must be a nonzero constant");
        cplx invf = 1.0 / sigma_.constant_value();
        // basis (dz1^s, dz2^s, dz1^t, dz2^t | conj): Omega0 = (Omega, -Omega)
        Omega0_(0, 1) = invf;
        Omega0_(1, 0) = -invf;
        Omega0_(2, 3) = -invf;
        Omega0_(3, 2) = invf;
        S_(0, 0) = S_(1, 1) = 1.0;
        S_(2, 4) = S_(3, 5) = 1.0;
        T_(0, 2) = T_(1, 3) = 1.0;
        T_(2, 6) = T_(3, 7) = 1.0;
        dI_(0, 0) = dI_(2, 0) = 1.0;
        dI_(1, 1) = dI_(3, 1) = 1.0;
        dI_(4, 2) = dI_(6, 2) = 1.0;
        dI_(5, 3) = dI_(7, 3) = 1.0;
        for (int j = 0; j < 4; ++j) {
            SM_(j, 4 + j) = 1.0;
            SM_(4 + j, j) = 1.0;
            T01_(4 + j, j) = 1.0;
        }
        // real coords (x1..x4, y1..y4)
        auto pair = [&](int row_h, int col_re) {
            C_(row_h, col_re) = 1.0;
            C_(row_h + 4, col_re) = 1.0;
            C_(row_h, col_re + 1) = cplx(0.0, 1.0);
            C_(row_h + 4, col_re + 1) = cplx(0.0, -1.0);
        };
        pair(0, 0);
        pair(1, 2);
        pair(2, 4);
        pair(3, 6);
    }
    // tau: invert the holomorphic block of Omega0^T
    Mat8 F = form_map(Omega0_);
    tau_ = Mat8::Zero();
    tau_.topLeftCorner<4, 4>() = F.topLeftCorner<4, 4>().inverse();
    validate();
}

Mat4 RealizationModel::sigma_map() const {
    Mat4 Sg = Mat4::Zero();
    cplx f = sigma_.constant_value();
    Sg(0, 1) = f;
    Sg(1, 0) = -f;
    return Sg;
}

void RealizationModel::base_points(const Vec8r& pt, double xs[4], double xt[4]) const {
    for (int i = 0; i < 4; ++i)
        xs[i] = pt[i];
    if (kind_ == ModelKind::Cotangent)
        for (int i = 0; i < 4; ++i)
            xt[i] = pt[i];
    else
        for (int i = 0; i < 4; ++i)
            xt[i] = pt[4 + i];
}

Vec8r RealizationModel::random_point(Rng& rng, bool on_grid) const {
    Vec8r pt;
    int n = K_->grid().n();
    auto coord = [&]() {
        return on_grid ? static_cast<double>(rng.integer(0, n - 1)) / n : rng.uniform();
    };
    for (int i = 0; i < 4; ++i)
        pt[i] = coord();
    if (kind_ == ModelKind::Cotangent)
        for (int i = 4; i < 8; ++i)
            pt[i] = rng.uniform(-p_max_, p_max_);
    else
        for (int i = 4; i < 8; ++i)
            pt[i] = coord();
    return pt;
}

void RealizationModel::validate() const {
    double r1 = (S_ * dI_ - Mat4::Identity()).cwiseAbs().maxCoeff();
    double r2 = (T_ * dI_ - Mat4::Identity()).cwiseAbs().maxCoeff();
    double r3 = (dI_.transpose() * Omega0_ * dI_).cwiseAbs().maxCoeff(); // iota Lagrangian
    Mat8 F = form_map(Omega0_);
    double r4 = (tau_ * F - (Mat8() << Mat4::Identity(), Mat4::Zero(), Mat4::Zero(), Mat4::Zero())
                                .finished())
                    .cwiseAbs()
                    .maxCoeff(); // tau Omega0 = id on T^{1,0}
    if (std::max({r1, r2, r3, r4}) > 1e-12)
        throw std::runtime_error("RealizationModel: structural identity violated");
}

LiftedFamily::LiftedFamily(std::shared_ptr<const RealizationModel> model,
                           std::shared_ptr<const DeformationSeries> series)
    : model_(std::move(model)), series_(std::move(series)) {
    RadiusEstimate re = radius_estimate(*series_);
    radius_ = re.radius;
    int N = series_->truncation();
    for (int n = 1; n <= N; ++n) {
        std::vector<cplx> comps;
        const ComplexForm& w = series_->omega(n);
        std::vector<std::vector<cplx>> cc;
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                cc.push_back(w.comp(j + 1, k + 1).to_physical());
        phys_.omega_comps.push_back({});
        auto& slot = phys_.omega_comps.back();
        for (auto& c : cc)
            for (auto v : c)
                slot.push_back(v);
        // layout: comp-major [jk][ix]
    }
    for (int n = 2; n <= N; ++n)
        phys_.gamma_comp.push_back(series_->gamma(n).comp(0, 3).to_physical());
}

namespace {
// nearest-grid check: x is a grid point iff x*n is integral (within 1e-12)
bool grid_index(const Grid& g, const double x[4], std::size_t& ix) {
    int n = g.n();
    int id[4];
    for (int a = 0; a < 4; ++a) {
        double v = x[a] * n;
        double r = std::round(v);
        if (std::abs(v - r) > 1e-12 * n)
            return false;
        id[a] = static_cast<int>(r) % n;
        if (id[a] < 0)
            id[a] += n;
    }
    ix = g.flat(id[0], id[1], id[2], id[3]);
    return true;
}
} // namespace

void LiftedFamily::beta_values(cplx z, const double x[4], Mat2& w11, cplx& chi02) const {
    const Grid& g = model_->kahler().grid();
    int N = series_->truncation();
    std::size_t ix = 0;
    bool on_grid = grid_index(g, x, ix);
    w11.setZero();
    chi02 = cplx(0.0, 0.0);
    std::size_t sz = g.size();
    cplx zn = z;
    for (int n = 1; n <= N; ++n) {
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) {
                cplx v = on_grid
                             ? phys_.omega_comps[static_cast<std::size_t>(n - 1)]
                                                [static_cast<std::size_t>(2 * j + k) * sz + ix]
                             : series_->omega(n).comp(j + 1, k + 1).eval_at(x);
                w11(j, k) += zn * v;
            }
        if (n >= 2) {
            cplx v = on_grid ? phys_.gamma_comp[static_cast<std::size_t>(n - 2)][ix]
                             : series_->gamma(n).comp(0, 3).eval_at(x);
            chi02 += zn * v;
        }
        zn *= z;
    }
}

Mat2 LiftedFamily::omega_values(cplx z, const double x[4]) const {
    Mat2 w;
    cplx chi;
    beta_values(z, x, w, chi);
    return w;
}

Mat2 LiftedFamily::omega1_values(const double x[4]) const {
    const Grid& g = model_->kahler().grid();
    std::size_t ix = 0;
    Mat2 m;
    bool on_grid = grid_index(g, x, ix);
    std::size_t sz = g.size();
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
            m(j, k) = on_grid ? phys_.omega_comps[0][static_cast<std::size_t>(2 * j + k) * sz + ix]
                              : series_->omega(1).comp(j + 1, k + 1).eval_at(x);
    return m;
}

Mat8 LiftedFamily::omega_matrix(cplx z1, cplx z2, const Vec8r& pt) const {
    double xs[4], xt[4];
    model_->base_points(pt, xs, xt);
    Mat2 w1, w2;
    cplx c1, c2;
    beta_values(z1, xs, w1, c1);
    beta_values(z2, xt, w2, c2);
    Mat4 b1 = x_form_11(w1) + x_form_02(c1);
    Mat4 b2 = x_form_11(w2) + x_form_02(c2);
    const auto& S = model_->s_star();
    const auto& T = model_->t_star();
    return model_->Omega0() + S.transpose() * b1 * S - T.transpose() * b2 * T;
}

Mat8 LiftedFamily::eta_matrix(cplx z1, cplx z2, const Vec8r& pt) const {
    double xs[4], xt[4];
    model_->base_points(pt, xs, xt);
    Mat4 b1 = x_form_11(omega_values(z1, xs));
    Mat4 b2 = x_form_11(omega_values(z2, xt));
    const auto& S = model_->s_star();
    const auto& T = model_->t_star();
    return S.transpose() * b1 * S - T.transpose() * b2 * T;
}

Mat4 LiftedFamily::phi_matrix(cplx z, const double x[4]) const {
    Mat4 W = x_form_11(omega_values(z, x));
    return -model_->sigma_map() * form_map(W);
}

DualPairResiduals dual_pair_relations(const RealizationModel& m) {
    DualPairResiduals r;
    const Mat8& tau = m.tau();
    Mat4 Sg = m.sigma_map();
    Eigen::Matrix<cplx, 8, 4> Sst = m.s_star().transpose();
    Eigen::Matrix<cplx, 8, 4> Tst = m.t_star().transpose();
    r.s_tau_s = (m.s_star() * tau * Sst - Sg).cwiseAbs().maxCoeff();
    r.t_tau_t = (m.t_star() * tau * Tst + Sg).cwiseAbs().maxCoeff();
    r.s_tau_t = (m.s_star() * tau * Tst).cwiseAbs().maxCoeff();
    r.t_tau_s = (m.t_star() * tau * Sst).cwiseAbs().maxCoeff();
    return r;
}

KernelCheck kernel_check(const LiftedFamily& f, cplx z1, cplx z2, const Vec8r& pt,
                         double gap_threshold) {
    KernelCheck out;
    Mat8 Om = f.omega_matrix(z1, z2, pt);
    Mat8 F = form_map(Om);
    Eigen::JacobiSVD<Mat8> svd(F, Eigen::ComputeFullV);
    auto sv = svd.singularValues();
    out.gap = sv(3) / std::max(sv(4), 1e-300);
    out.basis = svd.matrixV().rightCols<4>();
    if (out.gap < gap_threshold) {
        out.indeterminate = true;
        return out;
    }
    out.dim = 4;
    // formula (4.5): Omega (1 + psi) v = 0 for v in T01
    Mat8 eta = f.eta_matrix(z1, z2, pt);
    Mat8 psi = -f.model().tau() * form_map(eta);
    Eigen::Matrix<cplx, 8, 4> V = (Mat8::Identity() + psi) * f.model().t01_basis();
    out.formula_residual = (F * V).cwiseAbs().maxCoeff();
    return out;
}

namespace {
Mat8 conj_op(const Mat8& swap, const Mat8& A) {
    return swap * A.conjugate() * swap;
}
Mat4 conj_op4(const Mat4& A) {
    Mat4 S = Mat4::Zero();
    S(0, 2) = S(1, 3) = S(2, 0) = S(3, 1) = 1.0;
    return S * A.conjugate() * S;
}
} // namespace

TransversalityCheck reality_transversality(const LiftedFamily& f, cplx z1, cplx z2, const Vec8r& pt) {
    TransversalityCheck out;
    KernelCheck kc = kernel_check(f, z1, z2, pt);
    const Mat8& SM = f.model().conj_swap();
    Eigen::Matrix<cplx, 8, 4> Kb = kc.basis;
    Eigen::Matrix<cplx, 8, 4> Kc = SM * Kb.conjugate();
    Eigen::HouseholderQR<Eigen::Matrix<cplx, 8, 4>> q1(Kb), q2(Kc);
    Eigen::Matrix<cplx, 8, 4> Q1 = q1.householderQ() * Eigen::Matrix<cplx, 8, 4>::Identity();
    Eigen::Matrix<cplx, 8, 4> Q2 = q2.householderQ() * Eigen::Matrix<cplx, 8, 4>::Identity();
    Eigen::JacobiSVD<Mat4> svd(Q1.adjoint() * Q2);
    double smax = svd.singularValues().maxCoeff();
    out.margin = std::sqrt(std::max(0.0, 1.0 - smax * smax));
    // psi-psibar identities pulled to the base
    double xs[4], xt[4];
    f.model().base_points(pt, xs, xt);
    Mat8 eta = f.eta_matrix(z1, z2, pt);
    Mat8 psi = -f.model().tau() * form_map(eta);
    Mat8 psib = conj_op(f.model().conj_swap(), psi);
    Mat4 phi1 = f.phi_matrix(z1, xs);
    Mat4 phi2 = f.phi_matrix(z2, xt);
    Mat4 phib1 = conj_op4(phi1);
    Mat4 phib2 = conj_op4(phi2);
    const auto& S = f.model().s_star();
    const auto& T = f.model().t_star();
    out.psi_identity_s =
        (S * (Mat8::Identity() - psi * psib) - (Mat4::Identity() - phi1 * phib1) * S).cwiseAbs().maxCoeff();
    out.psi_identity_t =
        (T * (Mat8::Identity() - psi * psib) - (Mat4::Identity() - phi2 * phib2) * T).cwiseAbs().maxCoeff();
    return out;
}

AlmostComplexResult almost_complex(const LiftedFamily& f, cplx z1, cplx z2, const Vec8r& pt) {
    AlmostComplexResult out;
    KernelCheck kc = kernel_check(f, z1, z2, pt);
    if (kc.indeterminate)
        throw std::runtime_error("almost_complex: kernel dimension indeterminate");
    const Mat8& SM = f.model().conj_swap();
    Mat8 B;
    B.leftCols<4>() = SM * kc.basis.conjugate(); // T^{1,0}
    B.rightCols<4>() = kc.basis;                 // T^{0,1}
    Mat8 D = Mat8::Zero();
    for (int i = 0; i < 4; ++i) {
        D(i, i) = cplx(0.0, 1.0);
        D(4 + i, 4 + i) = cplx(0.0, -1.0);
    }
    Mat8 Ic = B * D * B.inverse();
    const Mat8& C = f.model().real_to_complex();
    Mat8 Ir = C.inverse() * Ic * C;
    out.imag_residual = Ir.imag().cwiseAbs().maxCoeff();
    out.I = Ir.real();
    out.i_square_residual =
        (out.I * out.I + Eigen::Matrix<double, 8, 8>::Identity()).cwiseAbs().maxCoeff();
    return out;
}

double nijenhuis_residual(const LiftedFamily& f, cplx z1, cplx z2, const Vec8r& pt, double h) {
    using M8d = Eigen::Matrix<double, 8, 8>;
    std::array<M8d, 8> dI;
    for (int l = 0; l < 8; ++l) {
        Vec8r pp = pt, pm = pt;
        pp[l] += h;
        pm[l] -= h;
        dI[static_cast<std::size_t>(l)] =
            (almost_complex(f, z1, z2, pp).I - almost_complex(f, z1, z2, pm).I) / (2.0 * h);
    }
    M8d I = almost_complex(f, z1, z2, pt).I;
    double worst = 0.0;
    for (int i = 0; i < 8; ++i)
        for (int j = i + 1; j < 8; ++j)
            for (int k = 0; k < 8; ++k) {
                double acc = 0.0;
                for (int l = 0; l < 8; ++l)
                    acc += I(l, i) * dI[static_cast<std::size_t>(l)](k, j) -
                           I(l, j) * dI[static_cast<std::size_t>(l)](k, i) -
                           I(k, l) * (dI[static_cast<std::size_t>(i)](l, j) -
                                      dI[static_cast<std::size_t>(j)](l, i));
                worst = std::max(worst, std::abs(acc));
            }
    return worst;
}

double antidiagonal_pullback_residual(const LiftedFamily& f, const std::vector<cplx>& zetas,
                                      const std::vector<Vec8r>& base_points) {
    double worst = 0.0;
    const cplx iu(0.0, 1.0);
    for (const auto& pt : base_points) {
        double xs[4], xt[4];
        f.model().base_points(pt, xs, xt);
        Mat4 w1m = x_form_11(f.omega1_values(xs));
        for (cplx z : zetas) {
            Mat8 Om = f.omega_matrix(iu * z, -iu * z, pt);
            Mat4 pulled = f.model().d_iota().transpose() * Om * f.model().d_iota();
            double r = (pulled - 2.0 * iu * z * w1m).cwiseAbs().maxCoeff() / std::abs(z);
            worst = std::max(worst, r);
        }
    }
    return worst;
}

double bisection_identity_residual(const LiftedFamily& f, cplx z1, cplx z2, const Vec8r& base_pt) {
    double xs[4], xt[4];
    f.model().base_points(base_pt, xs, xt);
    Mat2 w1, w2;
    cplx c1, c2;
    f.beta_values(z1, xs, w1, c1);
    f.beta_values(z2, xs, w2, c2); // both at the same base point (pt on the Lagrangian)
    Mat4 bd = x_form_11(w1) + x_form_02(c1) - x_form_11(w2) - x_form_02(c2);
    Mat8 Om = f.omega_matrix(z1, z2, base_pt);
    Mat4 pulled = f.model().d_iota().transpose() * Om * f.model().d_iota();
    return (pulled - bd).cwiseAbs().maxCoeff();
}

double closedness_fd_residual(const LiftedFamily& f, cplx z1, cplx z2, const Vec8r& pt, double h) {
    // central differences of the real-coordinate matrix of Omega
    const Mat8& C = f.model().real_to_complex();
    auto omega_real = [&](const Vec8r& q) -> Mat8 {
        return C.transpose() * f.omega_matrix(z1, z2, q) * C;
    };
    std::array<Mat8, 8> dW;
    for (int l = 0; l < 8; ++l) {
        Vec8r pp = pt, pm = pt;
        pp[l] += h;
        pm[l] -= h;
        dW[static_cast<std::size_t>(l)] = (omega_real(pp) - omega_real(pm)) / (2.0 * h);
    }
    double worst = 0.0;
    for (int a = 0; a < 8; ++a)
        for (int b = a + 1; b < 8; ++b)
            for (int c = b + 1; c < 8; ++c) {
                cplx v = dW[static_cast<std::size_t>(a)](b, c) + dW[static_cast<std::size_t>(b)](c, a) +
                         dW[static_cast<std::size_t>(c)](a, b);
                worst = std::max(worst, std::abs(v));
            }
    return worst;
}

} // namespace hkt
