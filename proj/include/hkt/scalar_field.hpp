#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "hkt/fft.hpp"
#include "hkt/grid.hpp"

namespace hkt {

// Complex scalar field on the torus, stored as spectral coefficients.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(std::shared_ptr<const Grid> g)
        : grid_(std::move(g)), hat_(grid_->size(), cplx(0.0, 0.0)) {}
    ScalarField(std::shared_ptr<const Grid> g, std::vector<cplx> hat)
        : grid_(std::move(g)), hat_(std::move(hat)) {}

    const Grid& grid() const { return *grid_; }
    std::shared_ptr<const Grid> grid_ptr() const { return grid_; }
    const std::vector<cplx>& hat() const { return hat_; }
    std::vector<cplx>& hat() { return hat_; }

    static ScalarField constant(std::shared_ptr<const Grid> g, cplx value) {
        ScalarField f(std::move(g));
        f.hat_[0] = value;
        return f;
    }

    // single Fourier mode: coef * e^{2 pi i k.x}
    static ScalarField mode(std::shared_ptr<const Grid> g, const int k[4], cplx coef) {
        ScalarField f(g);
        int n = g->n();
        auto w = [&](int v) { return ((v % n) + n) % n; };
        f.hat_[g->flat(w(k[0]), w(k[1]), w(k[2]), w(k[3]))] = coef;
        return f;
    }

    static ScalarField from_physical(std::shared_ptr<const Grid> g, std::vector<cplx> phys) {
        fft::forward(g->n(), phys);
        ScalarField f(std::move(g), std::move(phys));
        f.zero_nyquist();
        return f;
    }

    std::vector<cplx> to_physical() const {
        std::vector<cplx> a = hat_;
        fft::backward(grid_->n(), a);
        return a;
    }

    void zero_nyquist() {
        const Grid& g = *grid_;
        int n = g.n();
        for (int i0 = 0; i0 < n; ++i0)
            for (int i1 = 0; i1 < n; ++i1)
                for (int i2 = 0; i2 < n; ++i2)
                    for (int i3 = 0; i3 < n; ++i3)
                        if (g.is_nyquist(i0) || g.is_nyquist(i1) || g.is_nyquist(i2) || g.is_nyquist(i3))
                            hat_[g.flat(i0, i1, i2, i3)] = cplx(0.0, 0.0);
    }

    ScalarField& operator+=(const ScalarField& o) {
        for (std::size_t i = 0; i < hat_.size(); ++i) hat_[i] += o.hat_[i];
        return *this;
    }
    ScalarField& operator-=(const ScalarField& o) {
        for (std::size_t i = 0; i < hat_.size(); ++i) hat_[i] -= o.hat_[i];
        return *this;
    }
    ScalarField& operator*=(cplx s) {
        for (auto& v : hat_) v *= s;
        return *this;
    }
    friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
    friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
    friend ScalarField operator*(cplx s, ScalarField a) { return a *= s; }

    // d/dz_j and d/dzbar_j (j = 0,1), exact spectral symbols:
    //   d/dz1 ~ pi (i k1 + k2), d/dzbar1 ~ pi (i k1 - k2), same with (k3,k4).
    ScalarField dz(int j) const { return deriv(j, +1.0); }
    ScalarField dzbar(int j) const { return deriv(j, -1.0); }

    // conj(a): spectral conj with k -> -k
    ScalarField conjugate() const {
        const Grid& g = *grid_;
        int n = g.n();
        ScalarField out(grid_);
        for (int i0 = 0; i0 < n; ++i0)
            for (int i1 = 0; i1 < n; ++i1)
                for (int i2 = 0; i2 < n; ++i2)
                    for (int i3 = 0; i3 < n; ++i3)
                        out.hat_[g.flat((n - i0) % n, (n - i1) % n, (n - i2) % n, (n - i3) % n)] =
                            std::conj(hat_[g.flat(i0, i1, i2, i3)]);
        return out;
    }

    double l2() const {
        double s = 0.0;
        for (const auto& v : hat_) s += std::norm(v);
        return std::sqrt(s);
    }

    double max_hat() const {
        double s = 0.0;
        for (const auto& v : hat_) s = std::max(s, std::abs(v));
        return s;
    }

    // de-aliased pointwise product (3/2 rule)
    friend ScalarField dealiased_product(const ScalarField& a, const ScalarField& b) {
        const Grid& g = a.grid();
        int n = g.n(), m = 3 * n / 2;
        auto pa = fft::pad_spectral(g, a.hat_, m);
        auto pb = fft::pad_spectral(g, b.hat_, m);
        fft::backward(m, pa);
        fft::backward(m, pb);
        for (std::size_t i = 0; i < pa.size(); ++i) pa[i] *= pb[i];
        fft::forward(m, pa);
        ScalarField out(a.grid_ptr());
        fft::truncate_spectral(g, pa, m, out.hat_);
        return out;
    }

    // value at an arbitrary point x in [0,1)^4 by direct mode summation
    cplx eval_at(const double x[4]) const;

private:
    ScalarField deriv(int j, double sgn) const {
        const Grid& g = *grid_;
        int n = g.n();
        ScalarField out(grid_);
        const double pi = 3.14159265358979323846;
        for (int i0 = 0; i0 < n; ++i0)
            for (int i1 = 0; i1 < n; ++i1)
                for (int i2 = 0; i2 < n; ++i2)
                    for (int i3 = 0; i3 < n; ++i3) {
                        double ka = (j == 0) ? g.freq(i0) : g.freq(i2);
                        double kb = (j == 0) ? g.freq(i1) : g.freq(i3);
                        out.hat_[g.flat(i0, i1, i2, i3)] =
                            hat_[g.flat(i0, i1, i2, i3)] * (pi * cplx(0.0, ka) + pi * sgn * kb);
                    }
        return out;
    }

    std::shared_ptr<const Grid> grid_;
    std::vector<cplx> hat_;
};

} // namespace hkt
