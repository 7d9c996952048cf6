#pragma once

#include <cstdint>
#include <random>

#include "hkt/forms.hpp"

namespace hkt {

// Deterministic RNG for sampling and test batteries; one generator per
// command invocation, seeded from the config.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform(double lo = 0.0, double hi = 1.0) {
        return std::uniform_real_distribution<double>(lo, hi)(eng_);
    }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(eng_); }
    int integer(int lo, int hi) { // inclusive
        return std::uniform_int_distribution<int>(lo, hi)(eng_);
    }
    cplx cnormal() { return {normal(), normal()}; }

    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
};

// trig-polynomial random field with modes |k_i| <= kmax
ScalarField random_field(std::shared_ptr<const Grid> g, Rng& rng, int kmax = 2, int terms = 6,
                         bool real = false);

ComplexForm random_form(std::shared_ptr<const Grid> g, int p, int q, Rng& rng, int kmax = 2,
                        int terms = 6);

// dense low-band random form: every mode |k_i| <= kmax populated
ComplexForm dense_random_form(std::shared_ptr<const Grid> g, int p, int q, Rng& rng, int kmax = 2);

} // namespace hkt
