#include "hkt/deformation.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace hkt {

DeformationSeries::DeformationSeries(Bivector sigma, std::shared_ptr<const Kahler> K, int N,
                                     ComplexForm seed)
    : sigma_(std::move(sigma)), K_(std::move(K)), N_(N) {
    if (N_ < 1)
        throw std::invalid_argument("DeformationSeries: N >= 1 required");
    omega_.push_back(std::move(seed));
}

void DeformationSeries::build() {
    auto g = K_->grid_ptr();
    diag.clear();
    for (int n = 2; n <= N_; ++n) {
        ComplexForm gn(g, 0, 2);
        for (int i = 1; i < n; ++i) {
            int j = n - i;
            gn += contract_sigma_pair(sigma_, omega(i), omega(j));
        }
        GreenStats st;
        ComplexForm wn = K_->lemma_solve(gn, green_tol, green_max_iter, &st);
        SeriesOrderDiag dgn;
        dgn.n = n;
        dgn.green_iterations = st.iterations;
        dgn.green_residual = st.residual;
        ComplexForm dg = del(gn);
        double sc = std::max(dg.l2(), 1e-300);
        dgn.eq_residual = (delbar(wn) + dg).l2() / sc;
        dgn.del_residual = del(wn).l2();
        dgn.dbar_star_residual = wn.l2() > 0 ? K_->delbar_star(wn).l2() : 0.0;
        dgn.lefschetz_residual = wedge(wn, omega(1)).l2();
        dgn.norm_l2 = wn.l2();
        dgn.norm_sob = wn.sobolev(sobolev_s);
        diag.push_back(dgn);
        gamma_.push_back(std::move(gn));
        omega_.push_back(std::move(wn));
    }
}

ComplexForm DeformationSeries::omega_at(cplx zeta) const {
    ComplexForm acc = omega(N_);
    for (int n = N_ - 1; n >= 1; --n) {
        acc *= zeta;
        acc += omega(n);
    }
    acc *= zeta;
    return acc;
}

std::pair<ComplexForm, ComplexForm> DeformationSeries::beta(int n) const {
    auto g = K_->grid_ptr();
    if (n == 1)
        return {omega(1), ComplexForm(g, 0, 2)};
    return {omega(n), gamma(n)};
}

std::pair<ComplexForm, ComplexForm> DeformationSeries::beta_at(cplx zeta) const {
    ComplexForm w = omega_at(zeta);
    auto g = K_->grid_ptr();
    ComplexForm chi(g, 0, 2);
    for (int n = N_; n >= 2; --n) {
        chi *= zeta;
        chi += gamma(n);
    }
    chi *= zeta * zeta;
    return {std::move(w), std::move(chi)};
}

DeformationSeries hitchin_series(const Bivector& sigma, std::shared_ptr<const Kahler> K, int N,
                                 double green_tol, int green_max_iter) {
    DeformationSeries s(sigma, K, N, K->omega1());
    s.green_tol = green_tol;
    s.green_max_iter = green_max_iter;
    s.build();
    return s;
}

OddVanishingReport odd_vanishing_check(const DeformationSeries& s) {
    OddVanishingReport r;
    for (int n = 3; n <= s.truncation(); n += 2)
        r.max_odd_norm = std::max(r.max_odd_norm, s.omega(n).l2());
    for (int n = 2; n <= s.truncation(); n += 2) {
        ComplexForm c = contract_sigma_pair(s.sigma(), s.omega(n), s.omega(1));
        r.max_even_contract_norm = std::max(r.max_even_contract_norm, c.l2());
    }
    return r;
}

BetaClosedness beta_closedness(const DeformationSeries& s) {
    BetaClosedness out;
    for (int n = 1; n <= s.truncation(); ++n) {
        auto [b11, b02] = s.beta(n);
        double sc = std::max({b11.l2(), b02.l2(), 1e-300});
        out.max_del = std::max(out.max_del, del(b11).l2() / sc);
        out.max_mixed = std::max(out.max_mixed, (delbar(b11) + del(b02)).l2() / sc);
    }
    return out;
}

double mc_residual(const DeformationSeries& s, cplx zeta) {
    ComplexForm wz = s.omega_at(zeta);
    EndoField phi = phi_from(s.sigma(), wz);
    return mc_residual_field(phi).l2();
}

double invertibility_margin(const DeformationSeries& s, cplx zeta, int samples, Rng& rng) {
    ComplexForm wz = s.omega_at(zeta);
    EndoField phi = phi_from(s.sigma(), wz);
    // physical entries of phi and of phibar (entrywise conjugate)
    std::array<std::vector<cplx>, 4> pf;
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k)
            pf[static_cast<std::size_t>(2 * i + k)] = phi.entry(i, k).to_physical();
    const Grid& g = phi.grid();
    double margin = 1e300;
    for (int t = 0; t < samples; ++t) {
        std::size_t ix = g.flat(rng.integer(0, g.n() - 1), rng.integer(0, g.n() - 1),
                                rng.integer(0, g.n() - 1), rng.integer(0, g.n() - 1));
        Eigen::Matrix2cd M;
        // (phi phibar)^i_j = sum_k phi^i_k conj(phi^k_j)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                cplx acc(0.0, 0.0);
                for (int k = 0; k < 2; ++k)
                    acc += pf[static_cast<std::size_t>(2 * i + k)][ix] *
                           std::conj(pf[static_cast<std::size_t>(2 * k + j)][ix]);
                M(i, j) = (i == j ? cplx(1.0, 0.0) : cplx(0.0, 0.0)) - acc;
            }
        Eigen::JacobiSVD<Eigen::Matrix2cd> svd(M);
        margin = std::min(margin, svd.singularValues().minCoeff());
    }
    return margin;
}

double catalan_number(int n) {
    double c = 1.0;
    for (int i = 0; i < n; ++i)
        c = c * 2.0 * (2.0 * i + 1.0) / (i + 2.0);
    return c;
}

RadiusEstimate radius_estimate(const DeformationSeries& s) {
    RadiusEstimate r;
    int N = s.truncation();
    r.a.resize(static_cast<std::size_t>(N) + 1, 0.0);
    for (int n = 1; n <= N; ++n)
        r.a[static_cast<std::size_t>(n)] = s.omega(n).sobolev(s.sobolev_s);
    double c = 0.0;
    bool any = false;
    for (int n = 2; n <= N; ++n) {
        double den = 0.0;
        for (int i = 1; i < n; ++i)
            den += r.a[static_cast<std::size_t>(i)] * r.a[static_cast<std::size_t>(n - i)];
        if (den > 0.0 && r.a[static_cast<std::size_t>(n)] > 0.0) {
            c = std::max(c, r.a[static_cast<std::size_t>(n)] / den);
            any = true;
        }
    }
    r.c_est = c;
    if (!any || c == 0.0) {
        r.radius = std::numeric_limits<double>::infinity();
        r.catalan_ok = true;
        return r;
    }
    r.radius = 1.0 / (4.0 * c * r.a[1]);
    r.catalan_ok = true;
    for (int n = 1; n <= N; ++n) {
        double bound = std::pow(c, n - 1) * std::pow(r.a[1], n) * catalan_number(n - 1);
        if (r.a[static_cast<std::size_t>(n)] > bound * (1.0 + 1e-12))
            r.catalan_ok = false;
    }
    return r;
}

McSweep mc_order_sweep(const DeformationSeries& s, double z_lo, double z_hi, int points) {
    McSweep out;
    double lr = std::log(z_hi / z_lo) / (points - 1);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (int i = 0; i < points; ++i) {
        double z = z_lo * std::exp(lr * i);
        double r = mc_residual(s, cplx(z, 0.0));
        out.zeta.push_back(z);
        out.residual.push_back(r);
        if (r > 0.0) {
            double X = std::log(z), Y = std::log(r);
            sx += X; sy += Y; sxx += X * X; sxy += X * Y;
            ++m;
        }
    }
    out.slope = (m >= 2) ? (m * sxy - sx * sy) / (m * sxx - sx * sx) : 0.0;
    return out;
}

} // namespace hkt
