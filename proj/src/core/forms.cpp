#include "hkt/forms.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace hkt {

std::vector<CompIndex> components(int p, int q) {
    std::vector<CompIndex> out;
    for (int J : masks_of_len(p))
        for (int K : masks_of_len(q))
            out.push_back({J, K});
    return out;
}

std::pair<int, int> insert_index(int j, int m) {
    int bit = 1 << (j - 1);
    if (m & bit)
        return {0, 0};
    // indices below j present in m
    int below = 0;
    for (int i = 1; i < j; ++i)
        if (m & (1 << (i - 1)))
            ++below;
    return {(below % 2 == 0) ? 1 : -1, m | bit};
}

std::pair<int, int> merge_masks(int m1, int m2) {
    if (m1 & m2)
        return {0, 0};
    // count inversions between the sorted lists
    int sign = 1;
    for (int a = 2; a >= 1; --a)
        if (m1 & (1 << (a - 1)))
            for (int b = 1; b < a; ++b)
                if (m2 & (1 << (b - 1)))
                    sign = -sign;
    return {sign, m1 | m2};
}

ComplexForm::ComplexForm(std::shared_ptr<const Grid> g, int p, int q)
    : grid_(std::move(g)), p_(p), q_(q), comps_(components(p, q)) {
    if (p < 0 || p > 3 || q < 0 || q > 3)
        throw std::invalid_argument("ComplexForm: bidegree out of range");
    c_.reserve(comps_.size());
    for (std::size_t i = 0; i < comps_.size(); ++i)
        c_.emplace_back(grid_);
}

namespace {
int comp_pos(const std::vector<CompIndex>& cs, int J, int K) {
    for (std::size_t i = 0; i < cs.size(); ++i)
        if (cs[i].J == J && cs[i].K == K)
            return static_cast<int>(i);
    throw std::out_of_range("ComplexForm: no such component");
}
} // namespace

const ScalarField& ComplexForm::comp(int J, int K) const { return c_[static_cast<std::size_t>(comp_pos(comps_, J, K))]; }
ScalarField& ComplexForm::comp(int J, int K) { return c_[static_cast<std::size_t>(comp_pos(comps_, J, K))]; }

ComplexForm& ComplexForm::operator+=(const ComplexForm& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}
ComplexForm& ComplexForm::operator-=(const ComplexForm& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}
ComplexForm& ComplexForm::operator*=(cplx s) {
    for (auto& f : c_) f *= s;
    return *this;
}

ComplexForm ComplexForm::conjugate() const {
    ComplexForm out(grid_, q_, p_);
    for (std::size_t i = 0; i < comps_.size(); ++i) {
        int J = comps_[i].J, K = comps_[i].K;
        // conj(dz^J ^ dzbar^K) = dzbar^J ^ dz^K = (-1)^{|J||K|} dz^K ^ dzbar^J
        double sgn = (mask_len(J) * mask_len(K)) % 2 == 0 ? 1.0 : -1.0;
        out.comp(K, J) += cplx(sgn, 0.0) * c_[i].conjugate();
    }
    return out;
}

double ComplexForm::l2() const {
    double s = 0.0;
    for (const auto& f : c_) {
        double v = f.l2();
        s += v * v;
    }
    return std::sqrt(s);
}

double ComplexForm::sup() const {
    double s = 0.0;
    for (const auto& f : c_) {
        for (const auto& v : f.to_physical())
            s = std::max(s, std::abs(v));
    }
    return s;
}

double ComplexForm::sobolev(double sv) const {
    const Grid& g = *grid_;
    int n = g.n();
    double acc = 0.0;
    for (const auto& f : c_) {
        for (int i0 = 0; i0 < n; ++i0)
            for (int i1 = 0; i1 < n; ++i1)
                for (int i2 = 0; i2 < n; ++i2)
                    for (int i3 = 0; i3 < n; ++i3) {
                        double k2 = double(g.freq(i0)) * g.freq(i0) + double(g.freq(i1)) * g.freq(i1) +
                                    double(g.freq(i2)) * g.freq(i2) + double(g.freq(i3)) * g.freq(i3);
                        double w = std::pow(1.0 + k2, sv / 2.0);
                        acc += std::norm(f.hat()[g.flat(i0, i1, i2, i3)]) * w * w;
                    }
    }
    return std::sqrt(acc);
}

FormNorms norms(const ComplexForm& a, double s) {
    return {a.l2(), a.sup(), a.sobolev(s)};
}

ComplexForm wedge(const ComplexForm& a, const ComplexForm& b) {
    if (a.degree() + b.degree() > 4)
        throw std::invalid_argument("wedge: degree overflow");
    ComplexForm out(a.grid_ptr(), std::min(a.p() + b.p(), 3), std::min(a.q() + b.q(), 3));
    for (int ia = 0; ia < a.n_components(); ++ia) {
        auto [J1, K1] = a.comp_index()[static_cast<std::size_t>(ia)];
        for (int ib = 0; ib < b.n_components(); ++ib) {
            auto [J2, K2] = b.comp_index()[static_cast<std::size_t>(ib)];
            auto [sj, J] = merge_masks(J1, J2);
            auto [sk, K] = merge_masks(K1, K2);
            if (sj == 0 || sk == 0)
                continue;
            // move dz^{J2} (len |J2|) across dzbar^{K1} (len |K1|)
            int cross = (mask_len(J2) * mask_len(K1)) % 2 == 0 ? 1 : -1;
            double sgn = sj * sk * cross;
            out.comp(J, K) += cplx(sgn, 0.0) * dealiased_product(a.comp_at(ia), b.comp_at(ib));
        }
    }
    return out;
}

ComplexForm delbar(const ComplexForm& a) {
    if (a.degree() > 3)
        throw std::invalid_argument("delbar: degree out of range");
    ComplexForm out(a.grid_ptr(), a.p(), a.q() + 1);
    if (a.q() >= 2)
        return out; // (p,3) has no components
    for (int ia = 0; ia < a.n_components(); ++ia) {
        auto [J, K] = a.comp_index()[static_cast<std::size_t>(ia)];
        for (int k = 1; k <= 2; ++k) {
            auto [s, K2] = insert_index(k, K);
            if (s == 0)
                continue;
            double sgn = (mask_len(J) % 2 == 0 ? 1.0 : -1.0) * s;
            out.comp(J, K2) += cplx(sgn, 0.0) * a.comp_at(ia).dzbar(k - 1);
        }
    }
    return out;
}

ComplexForm del(const ComplexForm& a) {
    if (a.degree() > 3)
        throw std::invalid_argument("del: degree out of range");
    ComplexForm out(a.grid_ptr(), a.p() + 1, a.q());
    if (a.p() >= 2)
        return out;
    for (int ia = 0; ia < a.n_components(); ++ia) {
        auto [J, K] = a.comp_index()[static_cast<std::size_t>(ia)];
        for (int j = 1; j <= 2; ++j) {
            auto [s, J2] = insert_index(j, J);
            if (s == 0)
                continue;
            out.comp(J2, K) += cplx(double(s), 0.0) * a.comp_at(ia).dz(j - 1);
        }
    }
    return out;
}

ExteriorDerivative d(const ComplexForm& a) {
    return {del(a), delbar(a)};
}

ComplexForm flat_kahler_form(std::shared_ptr<const Grid> g, double scale) {
    ComplexForm w(g, 1, 1);
    w.comp(1, 1) = ScalarField::constant(g, cplx(0.0, 0.5 * scale));
    w.comp(2, 2) = ScalarField::constant(g, cplx(0.0, 0.5 * scale));
    return w;
}

ComplexForm holomorphic_volume(std::shared_ptr<const Grid> g, cplx coef) {
    ComplexForm w(g, 2, 0);
    w.comp(3, 0) = ScalarField::constant(g, coef);
    return w;
}

Bivector::Bivector(ScalarField f) : f_(std::move(f)), const_f_(0.0, 0.0), is_const_(false) {
    // constant iff only the k=0 coefficient is populated
    double off = 0.0;
    for (std::size_t i = 1; i < f_.hat().size(); ++i)
        off = std::max(off, std::abs(f_.hat()[i]));
    if (off == 0.0) {
        is_const_ = true;
        const_f_ = f_.hat()[0];
    }
}

double Bivector::holomorphy_residual() const {
    double sc = std::max(1.0, f_.l2());
    double r1 = f_.dzbar(0).l2(), r2 = f_.dzbar(1).l2();
    return std::sqrt(r1 * r1 + r2 * r2) / sc;
}

EndoField::EndoField(std::shared_ptr<const Grid> g) : grid_(std::move(g)) {
    for (int i = 0; i < 4; ++i)
        m_.emplace_back(grid_);
}

double EndoField::l2() const {
    double s = 0.0;
    for (const auto& f : m_) {
        double v = f.l2();
        s += v * v;
    }
    return std::sqrt(s);
}

ComplexForm contract_sigma_pair(const Bivector& sigma, const ComplexForm& w, const ComplexForm& wp) {
    if (w.p() != 1 || w.q() != 1 || wp.p() != 1 || wp.q() != 1)
        throw std::invalid_argument("contract_sigma_pair: both arguments must be (1,1)");
    // chi_{12bar} = (f/2)(w_{11}w'_{22} + w_{22}w'_{11} - w_{12}w'_{21} - w_{21}w'_{12})
    ScalarField acc = dealiased_product(w.comp(1, 1), wp.comp(2, 2));
    acc += dealiased_product(w.comp(2, 2), wp.comp(1, 1));
    acc -= dealiased_product(w.comp(1, 2), wp.comp(2, 1));
    acc -= dealiased_product(w.comp(2, 1), wp.comp(1, 2));
    ComplexForm out(w.grid_ptr(), 0, 2);
    if (sigma.is_constant())
        out.comp(0, 3) = (0.5 * sigma.constant_value()) * acc;
    else
        out.comp(0, 3) = cplx(0.5, 0.0) * dealiased_product(sigma.f(), acc);
    return out;
}

EndoField phi_from(const Bivector& sigma, const ComplexForm& w) {
    if (w.p() != 1 || w.q() != 1)
        throw std::invalid_argument("phi_from: argument must be (1,1)");
    EndoField e(w.grid_ptr());
    auto mul = [&](const ScalarField& a) {
        return sigma.is_constant() ? sigma.constant_value() * a : dealiased_product(sigma.f(), a);
    };
    e.entry(0, 0) = mul(w.comp(2, 1));
    e.entry(0, 1) = mul(w.comp(2, 2));
    e.entry(1, 0) = cplx(-1.0, 0.0) * mul(w.comp(1, 1));
    e.entry(1, 1) = cplx(-1.0, 0.0) * mul(w.comp(1, 2));
    return e;
}

VectorValued02 mc_bracket(const EndoField& phi, const EndoField& psi) {
    auto g = phi.grid_ptr();
    VectorValued02 out{ScalarField(g), ScalarField(g)};
    for (int i = 0; i < 2; ++i) {
        ScalarField acc(g);
        for (int l = 0; l < 2; ++l) {
            acc += dealiased_product(phi.entry(l, 0), psi.entry(i, 1).dz(l));
            acc += dealiased_product(psi.entry(l, 0), phi.entry(i, 1).dz(l));
            acc -= dealiased_product(phi.entry(l, 1), psi.entry(i, 0).dz(l));
            acc -= dealiased_product(psi.entry(l, 1), phi.entry(i, 0).dz(l));
        }
        (i == 0 ? out.v1 : out.v2) = acc;
    }
    return out;
}

VectorValued02 delbar_endo(const EndoField& phi) {
    auto g = phi.grid_ptr();
    VectorValued02 out{ScalarField(g), ScalarField(g)};
    out.v1 = phi.entry(0, 1).dzbar(0) - phi.entry(0, 0).dzbar(1);
    out.v2 = phi.entry(1, 1).dzbar(0) - phi.entry(1, 0).dzbar(1);
    return out;
}

VectorValued02 mc_residual_field(const EndoField& phi) {
    VectorValued02 db = delbar_endo(phi);
    VectorValued02 br = mc_bracket(phi, phi);
    db.v1 += cplx(0.5, 0.0) * br.v1;
    db.v2 += cplx(0.5, 0.0) * br.v2;
    return db;
}

namespace {
constexpr char kMagic[4] = {'H', 'K', 'T', 'F'};
}

void ComplexForm::save(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("save: cannot open " + path);
    f.write(kMagic, 4);
    std::uint32_t hdr[4] = {1u, static_cast<std::uint32_t>(grid_->n()),
                            static_cast<std::uint32_t>(p_), static_cast<std::uint32_t>(q_)};
    f.write(reinterpret_cast<const char*>(hdr), sizeof hdr);
    for (const auto& c : c_)
        f.write(reinterpret_cast<const char*>(c.hat().data()),
                static_cast<std::streamsize>(c.hat().size() * sizeof(cplx)));
    if (!f)
        throw std::runtime_error("save: write failed for " + path);
}

ComplexForm ComplexForm::load(const std::string& path, std::shared_ptr<const Grid> g) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("load: cannot open " + path);
    char magic[4];
    f.read(magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("load: bad magic in " + path);
    std::uint32_t hdr[4];
    f.read(reinterpret_cast<char*>(hdr), sizeof hdr);
    if (hdr[0] != 1u)
        throw std::runtime_error("load: unsupported version");
    int n = static_cast<int>(hdr[1]);
    if (!g)
        g = std::make_shared<Grid>(n);
    if (g->n() != n)
        throw std::runtime_error("load: grid mismatch");
    ComplexForm out(g, static_cast<int>(hdr[2]), static_cast<int>(hdr[3]));
    for (auto& c : out.c_)
        f.read(reinterpret_cast<char*>(c.hat().data()),
               static_cast<std::streamsize>(c.hat().size() * sizeof(cplx)));
    if (!f)
        throw std::runtime_error("load: truncated file " + path);
    return out;
}

cplx ScalarField::eval_at(const double x[4]) const {
    const Grid& g = *grid_;
    int n = g.n();
    const double two_pi = 2.0 * 3.14159265358979323846;
    std::vector<cplx> ph(static_cast<std::size_t>(4 * n));
    for (int ax = 0; ax < 4; ++ax)
        for (int i = 0; i < n; ++i)
            ph[static_cast<std::size_t>(ax * n + i)] =
                std::exp(cplx(0.0, two_pi * g.freq(i) * x[ax]));
    // contract innermost axis first
    cplx total(0.0, 0.0);
    for (int i0 = 0; i0 < n; ++i0) {
        cplx s0(0.0, 0.0);
        for (int i1 = 0; i1 < n; ++i1) {
            cplx s1(0.0, 0.0);
            for (int i2 = 0; i2 < n; ++i2) {
                cplx s2(0.0, 0.0);
                const cplx* row = &hat_[g.flat(i0, i1, i2, 0)];
                for (int i3 = 0; i3 < n; ++i3)
                    s2 += row[i3] * ph[static_cast<std::size_t>(3 * n + i3)];
                s1 += s2 * ph[static_cast<std::size_t>(2 * n + i2)];
            }
            s0 += s1 * ph[static_cast<std::size_t>(n + i1)];
        }
        total += s0 * ph[static_cast<std::size_t>(i0)];
    }
    return total;
}

} // namespace hkt
