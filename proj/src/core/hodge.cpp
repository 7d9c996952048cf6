#include "hkt/hodge.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace hkt {

namespace {

const double kPi = 3.14159265358979323846;

std::vector<int> mask_list(int m) {
    std::vector<int> out;
    if (m & 1) out.push_back(0);
    if (m & 2) out.push_back(1);
    return out;
}

} // namespace

Kahler::Kahler(std::shared_ptr<const Grid> g, const std::vector<RhoMode>& modes)
    : grid_(std::move(g)), omega1_(grid_, 1, 1) {
    const Grid& gr = *grid_;
    std::size_t sz = gr.size();
    flat_ = true;
    ScalarField rho(grid_);
    int n = gr.n();
    auto w = [&](int v) { return ((v % n) + n) % n; };
    for (const auto& m : modes) {
        if (m.amp != 0.0)
            flat_ = false;
        rho.hat()[gr.flat(w(m.k[0]), w(m.k[1]), w(m.k[2]), w(m.k[3]))] += cplx(m.amp / 2.0, 0.0);
        rho.hat()[gr.flat(w(-m.k[0]), w(-m.k[1]), w(-m.k[2]), w(-m.k[3]))] += cplx(m.amp / 2.0, 0.0);
    }
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
            ScalarField hjk = cplx(2.0, 0.0) * rho.dz(j).dzbar(k);
            auto phys = hjk.to_physical();
            if (j == k)
                for (auto& v : phys)
                    v += 1.0;
            h_[static_cast<std::size_t>(2 * j + k)] = std::move(phys);
            omega1_.comp(j + 1, k + 1) = ScalarField::from_physical(
                grid_, [&] {
                    std::vector<cplx> t = h_[static_cast<std::size_t>(2 * j + k)];
                    for (auto& v : t)
                        v *= cplx(0.0, 0.5);
                    return t;
                }());
        }
    det_.resize(sz);
    min_eig_ = 1e300;
    for (std::size_t i = 0; i < sz; ++i) {
        cplx d = h_[0][i] * h_[3][i] - h_[1][i] * h_[2][i];
        det_[i] = d.real();
        double tr = (h_[0][i] + h_[3][i]).real();
        double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det_[i]));
        min_eig_ = std::min(min_eig_, (tr - disc) / 2.0);
    }
    if (min_eig_ <= 0.0)
        throw std::runtime_error("Kahler: metric not positive definite (min eigenvalue " +
                                 std::to_string(min_eig_) + ")");
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
            hinv_[static_cast<std::size_t>(2 * j + k)].resize(sz);
    for (std::size_t i = 0; i < sz; ++i) {
        hinv_[0][i] = h_[3][i] / det_[i];
        hinv_[3][i] = h_[0][i] / det_[i];
        hinv_[1][i] = -h_[1][i] / det_[i];
        hinv_[2][i] = -h_[2][i] / det_[i];
    }
}

double Kahler::closedness_residual() const {
    double sc = std::max(omega1_.l2(), 1e-300);
    return d(omega1_).l2() / sc;
}

double Kahler::reality_residual() const {
    double sc = std::max(omega1_.l2(), 1e-300);
    return (omega1_.conjugate() - omega1_).l2() / sc;
}

namespace {

// minor determinant of the 2x2 matrix field M over index lists ja, jb
inline cplx pdet(const std::array<const cplx*, 4>& M, const std::vector<int>& ja,
                 const std::vector<int>& jb, std::size_t i) {
    if (ja.empty())
        return {1.0, 0.0};
    if (ja.size() == 1)
        return M[static_cast<std::size_t>(2 * ja[0] + jb[0])][i];
    return M[static_cast<std::size_t>(2 * ja[0] + jb[0])][i] * M[static_cast<std::size_t>(2 * ja[1] + jb[1])][i] -
           M[static_cast<std::size_t>(2 * ja[0] + jb[1])][i] * M[static_cast<std::size_t>(2 * ja[1] + jb[0])][i];
}

} // namespace

void Kahler::apply_weight(int p, int q, std::vector<std::vector<cplx>>& phys, bool inverse) const {
    auto cs = components(p, q);
    const std::size_t nc = cs.size();
    const std::size_t sz = grid_->size();
    // P = 2 conj(Hinv), Q = 2 Hinv as pointwise 2x2 matrices (entries from hinv_)
    std::array<std::vector<cplx>, 4> Pf, Qf;
    for (int e = 0; e < 4; ++e) {
        Pf[static_cast<std::size_t>(e)].resize(sz);
        Qf[static_cast<std::size_t>(e)].resize(sz);
        for (std::size_t i = 0; i < sz; ++i) {
            Pf[static_cast<std::size_t>(e)][i] = 2.0 * std::conj(hinv_[static_cast<std::size_t>(e)][i]);
            Qf[static_cast<std::size_t>(e)][i] = 2.0 * hinv_[static_cast<std::size_t>(e)][i];
        }
    }
    std::array<const cplx*, 4> Pp{Pf[0].data(), Pf[1].data(), Pf[2].data(), Pf[3].data()};
    std::array<const cplx*, 4> Qp{Qf[0].data(), Qf[1].data(), Qf[2].data(), Qf[3].data()};
    std::vector<std::vector<int>> Jl(nc), Kl(nc);
    for (std::size_t a = 0; a < nc; ++a) {
        Jl[a] = mask_list(cs[a].J);
        Kl[a] = mask_list(cs[a].K);
    }
    Eigen::MatrixXcd W(nc, nc);
    Eigen::VectorXcd v(nc), r(nc);
    for (std::size_t i = 0; i < sz; ++i) {
        for (std::size_t a = 0; a < nc; ++a)
            for (std::size_t b = 0; b < nc; ++b) {
                // W_{ab} = Gram_{ba} * detH
                cplx gba = pdet(Pp, Jl[b], Jl[a], i) * pdet(Qp, Kl[b], Kl[a], i);
                W(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = gba * det_[i];
            }
        for (std::size_t a = 0; a < nc; ++a)
            v(static_cast<Eigen::Index>(a)) = phys[a][i];
        if (inverse)
            r = W.partialPivLu().solve(v);
        else
            r = W * v;
        for (std::size_t a = 0; a < nc; ++a)
            phys[a][i] = r(static_cast<Eigen::Index>(a));
    }
}

ComplexForm Kahler::dbar_dag_flat(const ComplexForm& a) const {
    // flat-grid adjoint of dbar: (p, q) -> (p, q-1), spectral
    ComplexForm out(grid_, a.p(), a.q() - 1);
    for (int io = 0; io < out.n_components(); ++io) {
        auto [J, K] = out.comp_index()[static_cast<std::size_t>(io)];
        ScalarField acc(grid_);
        for (int k = 1; k <= 2; ++k) {
            auto [s, K2] = insert_index(k, K);
            if (s == 0)
                continue;
            double sgn = -(mask_len(J) % 2 == 0 ? 1.0 : -1.0) * s;
            acc += cplx(sgn, 0.0) * a.comp(J, K2).dz(k - 1);
        }
        out.comp_at(io) = acc;
    }
    return out;
}

ComplexForm Kahler::delbar_star(const ComplexForm& a) const {
    if (a.q() < 1)
        throw std::invalid_argument("delbar_star: q must be >= 1");
    if (flat_) {
        ComplexForm out = dbar_dag_flat(a);
        return cplx(2.0, 0.0) * out; // constant weights: W_q^{-1} W_{q+1} = 2
    }
    // physical, weight, back to spectral, incidence, physical, inverse weight
    std::vector<std::vector<cplx>> phys;
    for (int i = 0; i < a.n_components(); ++i)
        phys.push_back(a.comp_at(i).to_physical());
    apply_weight(a.p(), a.q(), phys, false);
    ComplexForm wa(grid_, a.p(), a.q());
    for (int i = 0; i < wa.n_components(); ++i) {
        auto t = phys[static_cast<std::size_t>(i)];
        fft::forward(grid_->n(), t);
        wa.comp_at(i) = ScalarField(grid_, std::move(t));
    }
    ComplexForm dag = dbar_dag_flat(wa);
    std::vector<std::vector<cplx>> phys2;
    for (int i = 0; i < dag.n_components(); ++i)
        phys2.push_back(dag.comp_at(i).to_physical());
    apply_weight(a.p(), a.q() - 1, phys2, true);
    ComplexForm out(grid_, a.p(), a.q() - 1);
    for (int i = 0; i < out.n_components(); ++i) {
        auto t = phys2[static_cast<std::size_t>(i)];
        fft::forward(grid_->n(), t);
        out.comp_at(i) = ScalarField(grid_, std::move(t));
    }
    return out;
}

ComplexForm Kahler::laplacian(const ComplexForm& a) const {
    ComplexForm out(grid_, a.p(), a.q());
    if (a.q() >= 1)
        out += delbar(delbar_star(a));
    if (a.q() <= 1)
        out += delbar_star(delbar(a));
    return out;
}

cplx Kahler::l2_inner(const ComplexForm& a, const ComplexForm& b) const {
    if (a.p() != b.p() || a.q() != b.q())
        throw std::invalid_argument("l2_inner: bidegree mismatch");
    auto cs = components(a.p(), a.q());
    const std::size_t nc = cs.size();
    const std::size_t sz = grid_->size();
    std::vector<std::vector<cplx>> fa, fb;
    for (int i = 0; i < a.n_components(); ++i) {
        fa.push_back(a.comp_at(i).to_physical());
        fb.push_back(b.comp_at(i).to_physical());
    }
    std::array<std::vector<cplx>, 4> Pf, Qf;
    for (int e = 0; e < 4; ++e) {
        Pf[static_cast<std::size_t>(e)].resize(sz);
        Qf[static_cast<std::size_t>(e)].resize(sz);
        for (std::size_t i = 0; i < sz; ++i) {
            Pf[static_cast<std::size_t>(e)][i] = 2.0 * std::conj(hinv_[static_cast<std::size_t>(e)][i]);
            Qf[static_cast<std::size_t>(e)][i] = 2.0 * hinv_[static_cast<std::size_t>(e)][i];
        }
    }
    std::array<const cplx*, 4> Pp{Pf[0].data(), Pf[1].data(), Pf[2].data(), Pf[3].data()};
    std::array<const cplx*, 4> Qp{Qf[0].data(), Qf[1].data(), Qf[2].data(), Qf[3].data()};
    std::vector<std::vector<int>> Jl(nc), Kl(nc);
    for (std::size_t a2 = 0; a2 < nc; ++a2) {
        Jl[a2] = mask_list(cs[a2].J);
        Kl[a2] = mask_list(cs[a2].K);
    }
    cplx tot(0.0, 0.0);
    for (std::size_t i = 0; i < sz; ++i) {
        cplx acc(0.0, 0.0);
        for (std::size_t ia = 0; ia < nc; ++ia)
            for (std::size_t ib = 0; ib < nc; ++ib) {
                cplx gab = pdet(Pp, Jl[ia], Jl[ib], i) * pdet(Qp, Kl[ia], Kl[ib], i);
                acc += gab * fa[ia][i] * std::conj(fb[ib][i]);
            }
        tot += acc * det_[i];
    }
    return tot / static_cast<double>(sz);
}

ComplexForm Kahler::harmonic_projection(const ComplexForm& a) const {
    ComplexForm out(grid_, a.p(), a.q());
    if (flat_) {
        for (int i = 0; i < a.n_components(); ++i)
            out.comp_at(i).hat()[0] = a.comp_at(i).hat()[0];
        return out;
    }
    bool top = (a.p() == 0 && a.q() == 2) || (a.p() == 2 && a.q() == 0);
    if (top) {
        // the (0,2)/(2,0) pairing weighted by the volume is constant, so the
        // harmonic representative is the constant form and the projection is
        // the k = 0 coefficient
        out.comp_at(0).hat()[0] = a.comp_at(0).hat()[0];
        return out;
    }
    if (a.p() == 0 && a.q() == 0) {
        auto phys = a.comp_at(0).to_physical();
        cplx num(0.0, 0.0);
        double den = 0.0;
        for (std::size_t i = 0; i < phys.size(); ++i) {
            num += phys[i] * det_[i];
            den += det_[i];
        }
        out.comp_at(0).hat()[0] = num / den;
        return out;
    }
    throw std::runtime_error("harmonic_projection: only (0,0), (0,2), (2,0) supported off the flat metric");
}

ComplexForm Kahler::green(const ComplexForm& a, double tol, int max_iter, GreenStats* stats) const {
    const Grid& g = *grid_;
    int n = g.n();
    ComplexForm rhs = a - harmonic_projection(a);
    if (flat_) {
        ComplexForm out = rhs;
        for (int c = 0; c < out.n_components(); ++c) {
            auto& hat = out.comp_at(c).hat();
            for (int i0 = 0; i0 < n; ++i0)
                for (int i1 = 0; i1 < n; ++i1)
                    for (int i2 = 0; i2 < n; ++i2)
                        for (int i3 = 0; i3 < n; ++i3) {
                            double k2 = double(g.freq(i0)) * g.freq(i0) + double(g.freq(i1)) * g.freq(i1) +
                                        double(g.freq(i2)) * g.freq(i2) + double(g.freq(i3)) * g.freq(i3);
                            auto& v = hat[g.flat(i0, i1, i2, i3)];
                            v = (k2 > 0.0) ? v / (flat_symbol_factor * kPi * kPi * k2) : cplx(0.0, 0.0);
                        }
        }
        if (stats)
            *stats = GreenStats{};
        return out;
    }
    if (!(a.p() == 0 && a.q() == 2))
        throw std::runtime_error("green: iterative path supports bidegree (0,2) only");
    if (rhs.l2() == 0.0) {
        if (stats)
            *stats = GreenStats{};
        return rhs;
    }
    // PCG on B = W Lap (grid-hermitian since W is the constant 4 on (0,2));
    // preconditioner divides by the flat symbol of B.
    auto B = [&](const ComplexForm& u) { return cplx(4.0, 0.0) * laplacian(u); };
    auto prec = [&](const ComplexForm& u) {
        ComplexForm out = u;
        auto& hat = out.comp_at(0).hat();
        for (int i0 = 0; i0 < n; ++i0)
            for (int i1 = 0; i1 < n; ++i1)
                for (int i2 = 0; i2 < n; ++i2)
                    for (int i3 = 0; i3 < n; ++i3) {
                        double k2 = double(g.freq(i0)) * g.freq(i0) + double(g.freq(i1)) * g.freq(i1) +
                                    double(g.freq(i2)) * g.freq(i2) + double(g.freq(i3)) * g.freq(i3);
                        auto& v = hat[g.flat(i0, i1, i2, i3)];
                        v = (k2 > 0.0) ? v / (4.0 * flat_symbol_factor * kPi * kPi * k2) : cplx(0.0, 0.0);
                    }
        return out;
    };
    auto ip = [](const ComplexForm& u, const ComplexForm& v) {
        cplx s(0.0, 0.0);
        for (int c = 0; c < u.n_components(); ++c) {
            const auto& uh = u.comp_at(c).hat();
            const auto& vh = v.comp_at(c).hat();
            for (std::size_t i = 0; i < uh.size(); ++i)
                s += uh[i] * std::conj(vh[i]);
        }
        return s;
    };
    ComplexForm b = cplx(4.0, 0.0) * rhs;
    ComplexForm x(grid_, 0, 2);
    ComplexForm r = b;
    double bnorm = std::sqrt(std::abs(ip(b, b)));
    ComplexForm z = prec(r);
    ComplexForm p = z;
    cplx rz = ip(r, z);
    GreenStats st;
    double res = 1.0;
    for (int it = 1; it <= max_iter; ++it) {
        ComplexForm Bp = B(p);
        cplx alpha = rz / ip(p, Bp);
        x += alpha * p;
        r -= alpha * Bp;
        res = std::sqrt(std::abs(ip(r, r))) / bnorm;
        st.iterations = it;
        st.history.push_back(res);
        if (res < tol)
            break;
        z = prec(r);
        cplx rz2 = ip(r, z);
        cplx beta = rz2 / rz;
        rz = rz2;
        ComplexForm pn = z;
        pn += beta * p;
        p = pn;
    }
    st.residual = res;
    if (res >= tol)
        throw std::runtime_error("green: CG failed to converge, residual " + std::to_string(res) +
                                 " after " + std::to_string(max_iter) + " iterations");
    // orthogonalize against the harmonic constant in L2(omega1)
    ComplexForm hconst(grid_, 0, 2);
    hconst.comp_at(0).hat()[0] = cplx(1.0, 0.0);
    cplx co = l2_inner(x, hconst) / l2_inner(hconst, hconst);
    x -= co * hconst;
    if (stats)
        *stats = st;
    return x;
}

ComplexForm Kahler::lemma_solve(const ComplexForm& gamma, double tol, int max_iter, GreenStats* stats) const {
    if (gamma.p() != 0 || gamma.q() != 2)
        throw std::invalid_argument("lemma_solve: gamma must be (0,2)");
    ComplexForm u = green(gamma, tol, max_iter, stats);
    if (u.l2() == 0.0)
        return ComplexForm(grid_, 1, 1);
    return del(delbar_star(u));
}

double Kahler::kahler_identity_residual(Rng& rng, int trials) const {
    double worst = 0.0;
    struct PQ { int p, q; };
    const PQ battery[3] = {{0, 1}, {1, 0}, {1, 1}};
    for (const auto& [p, q] : battery) {
        for (int t = 0; t < trials; ++t) {
            ComplexForm a = random_form(grid_, p, q, rng, 2, 5);
            ComplexForm lhs = delbar_star(wedge(a, omega1_));
            if (q >= 1)
                lhs -= wedge(delbar_star(a), omega1_);
            ComplexForm rhs = del(a);
            double r = (lhs - cplx(0.0, 1.0) * rhs).l2() / std::max(a.l2(), 1e-300);
            worst = std::max(worst, r);
        }
    }
    return worst;
}

} // namespace hkt
