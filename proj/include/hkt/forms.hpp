#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hkt/scalar_field.hpp"

namespace hkt {

// Multi-indices over {1,2}, strictly increasing, encoded as bitmasks 0..3:
// 0 = (), 1 = (1), 2 = (2), 3 = (1,2).
inline int mask_len(int m) { return (m & 1) + ((m >> 1) & 1); }

// list of index masks with given length; length 3 is empty (no such index on
// a complex surface), so (p,3)- and (3,q)-forms are the canonical zero forms.
inline const std::vector<int>& masks_of_len(int p) {
    static const std::vector<int> tab[4] = {{0}, {1, 2}, {3}, {}};
    return tab[p];
}

struct CompIndex {
    int J; // dz-mask
    int K; // dzbar-mask
};

// component list of a (p,q)-form, canonical order (J outer, K inner)
std::vector<CompIndex> components(int p, int q);

// sign of inserting single index j into increasing mask m; 0 if present.
// returns {sign, merged}
std::pair<int, int> insert_index(int j, int m);

// sign to sort the concatenation (J1,J2) of masks into one increasing list, 0 on overlap
std::pair<int, int> merge_masks(int m1, int m2);

// A complex differential form of bidegree (p,q) on the torus.
// form = sum_{J,K} c_{J,K} dz^J ^ dzbar^K with the canonical symbol order
// dz1 < dz2 < dzbar1 < dzbar2.
class ComplexForm {
public:
    ComplexForm() : p_(0), q_(0) {}
    ComplexForm(std::shared_ptr<const Grid> g, int p, int q);

    int p() const { return p_; }
    int q() const { return q_; }
    int degree() const { return p_ + q_; }
    const Grid& grid() const { return *grid_; }
    std::shared_ptr<const Grid> grid_ptr() const { return grid_; }

    int n_components() const { return static_cast<int>(comps_.size()); }
    const std::vector<CompIndex>& comp_index() const { return comps_; }
    const ScalarField& comp(int J, int K) const;
    ScalarField& comp(int J, int K);
    const ScalarField& comp_at(int i) const { return c_[static_cast<std::size_t>(i)]; }
    ScalarField& comp_at(int i) { return c_[static_cast<std::size_t>(i)]; }

    ComplexForm& operator+=(const ComplexForm& o);
    ComplexForm& operator-=(const ComplexForm& o);
    ComplexForm& operator*=(cplx s);
    friend ComplexForm operator+(ComplexForm a, const ComplexForm& b) { return a += b; }
    friend ComplexForm operator-(ComplexForm a, const ComplexForm& b) { return a -= b; }
    friend ComplexForm operator*(cplx s, ComplexForm a) { return a *= s; }

    // conjugation: (p,q) -> (q,p)
    ComplexForm conjugate() const;

    double l2() const;
    double sup() const;
    double sobolev(double s) const;

    bool is_zero(double tol = 0.0) const { return l2() <= tol; }

    // binary container round trip (little-endian complex pairs); see README
    void save(const std::string& path) const;
    static ComplexForm load(const std::string& path, std::shared_ptr<const Grid> g = nullptr);

private:
    std::shared_ptr<const Grid> grid_;
    int p_, q_;
    std::vector<CompIndex> comps_;
    std::vector<ScalarField> c_;
};

ComplexForm wedge(const ComplexForm& a, const ComplexForm& b);
ComplexForm del(const ComplexForm& a);
ComplexForm delbar(const ComplexForm& a);

// d = del + delbar, kept as its two bidegree pieces
struct ExteriorDerivative {
    ComplexForm dz_part;    // (p+1, q)
    ComplexForm dzbar_part; // (p, q+1)
    double l2() const { return std::hypot(dz_part.l2(), dzbar_part.l2()); }
};
ExteriorDerivative d(const ComplexForm& a);

// the two flat reference forms
ComplexForm flat_kahler_form(std::shared_ptr<const Grid> g, double scale = 1.0); // (i/2)(dz1^dzb1+dz2^dzb2)
ComplexForm holomorphic_volume(std::shared_ptr<const Grid> g, cplx coef = 1.0);  // coef dz1^dz2

// Holomorphic Poisson bivector sigma = f d/dz1 ^ d/dz2. On the compact torus
// holomorphy forces f constant; the general field is kept so the holomorphy
// residual dbar f can be measured.
class Bivector {
public:
    Bivector(std::shared_ptr<const Grid> g, cplx f_const)
        : f_(ScalarField::constant(g, f_const)), const_f_(f_const), is_const_(true) {}
    explicit Bivector(ScalarField f);

    const ScalarField& f() const { return f_; }
    bool is_constant() const { return is_const_; }
    cplx constant_value() const { return const_f_; }
    double holomorphy_residual() const; // |dbar f| / max(1, |f|)

private:
    ScalarField f_;
    cplx const_f_;
    bool is_const_;
};

// phi in Omega^{0,1}(T^{1,0}X): phi(d/dzbar_k) = phi[i][k] d/dz_i.
// As an endomorphism of T_C X it maps (0,1) to (1,0) and kills (1,0).
class EndoField {
public:
    explicit EndoField(std::shared_ptr<const Grid> g);
    ScalarField& entry(int i, int k) { return m_[static_cast<std::size_t>(2 * i + k)]; }
    const ScalarField& entry(int i, int k) const { return m_[static_cast<std::size_t>(2 * i + k)]; }
    const Grid& grid() const { return *grid_; }
    std::shared_ptr<const Grid> grid_ptr() const { return grid_; }
    double l2() const;

private:
    std::shared_ptr<const Grid> grid_;
    std::vector<ScalarField> m_;
};

// T^{1,0}-valued (0,2)-form, components v^i dzbar^1^dzbar^2 (x) d/dz_i
struct VectorValued02 {
    ScalarField v1, v2;
    double l2() const { return std::sqrt(v1.l2() * v1.l2() + v2.l2() * v2.l2()); }
};

// 1/2 i_sigma(w ^ w'), the symmetrized composition w o sigma o w' of bundle
// maps, returned as a (0,2)-form. Normalization fixed by the flat identity
// 1/2 i_sigma(wI ^ wI) = -1/4 conj(Omega) for sigma = Omega^{-1}.
ComplexForm contract_sigma_pair(const Bivector& sigma, const ComplexForm& w, const ComplexForm& wp);

// phi = -sigma o w for a (1,1)-form w: phi^1_k = f w_{2k}, phi^2_k = -f w_{1k}
EndoField phi_from(const Bivector& sigma, const ComplexForm& w);

// [phi,psi]^i_{jk} = phi^l_j d_l psi^i_k + psi^l_j d_l phi^i_k - (j <-> k),
// with the factor convention making dbar phi + 1/2 [phi,phi] the
// Maurer-Cartan residual.
VectorValued02 mc_bracket(const EndoField& phi, const EndoField& psi);
VectorValued02 delbar_endo(const EndoField& phi);
VectorValued02 mc_residual_field(const EndoField& phi);

struct FormNorms {
    double l2;
    double sup;
    double sobolev_s;
};
FormNorms norms(const ComplexForm& a, double s);

} // namespace hkt
