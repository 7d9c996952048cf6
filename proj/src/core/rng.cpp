#include "hkt/rng.hpp"

namespace hkt {

ScalarField random_field(std::shared_ptr<const Grid> g, Rng& rng, int kmax, int terms, bool real) {
    ScalarField f(g);
    int n = g->n();
    auto w = [&](int v) { return ((v % n) + n) % n; };
    for (int t = 0; t < terms; ++t) {
        int k[4];
        for (auto& ki : k)
            ki = rng.integer(-kmax, kmax);
        cplx c = rng.cnormal();
        f.hat()[g->flat(w(k[0]), w(k[1]), w(k[2]), w(k[3]))] += c;
        if (real)
            f.hat()[g->flat(w(-k[0]), w(-k[1]), w(-k[2]), w(-k[3]))] += std::conj(c);
    }
    return f;
}

ComplexForm random_form(std::shared_ptr<const Grid> g, int p, int q, Rng& rng, int kmax, int terms) {
    ComplexForm f(g, p, q);
    for (int i = 0; i < f.n_components(); ++i)
        f.comp_at(i) = random_field(g, rng, kmax, terms);
    return f;
}

ComplexForm dense_random_form(std::shared_ptr<const Grid> g, int p, int q, Rng& rng, int kmax) {
    ComplexForm f(g, p, q);
    int n = g->n();
    auto w = [&](int v) { return ((v % n) + n) % n; };
    for (int i = 0; i < f.n_components(); ++i) {
        auto& hat = f.comp_at(i).hat();
        for (int k0 = -kmax; k0 <= kmax; ++k0)
            for (int k1 = -kmax; k1 <= kmax; ++k1)
                for (int k2 = -kmax; k2 <= kmax; ++k2)
                    for (int k3 = -kmax; k3 <= kmax; ++k3)
                        hat[g->flat(w(k0), w(k1), w(k2), w(k3))] = rng.cnormal();
    }
    return f;
}

} // namespace hkt
