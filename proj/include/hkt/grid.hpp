#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace hkt {

using cplx = std::complex<double>;

// Discretization of the flat torus X = C^2/(Z+iZ)^2.
// Coordinates z1 = x1 + i x2, z2 = x3 + i x4, each x_i of period 1,
// n sample points per axis. Scalar fields are stored spectrally:
//   a(x) = sum_k ahat(k) e^{2 pi i k.x},  k integer, |k_i| <= n/2 - 1
// (Nyquist modes are kept zero so conjugation is an involution on the lattice).
class Grid {
public:
    explicit Grid(int n_per_axis) : n_(n_per_axis) {
        if (n_ < 8 || n_ % 2 != 0)
            throw std::invalid_argument("Grid: n_per_axis must be even and >= 8");
        freq_.resize(n_);
        for (int i = 0; i < n_; ++i)
            freq_[i] = (i <= n_ / 2 - 1) ? i : i - n_;
    }

    int n() const { return n_; }
    std::size_t size() const {
        auto m = static_cast<std::size_t>(n_);
        return m * m * m * m;
    }

    // integer frequency of axis index i (fft layout)
    int freq(int i) const { return freq_[static_cast<std::size_t>(i)]; }

    bool is_nyquist(int i) const { return freq_[static_cast<std::size_t>(i)] == -n_ / 2; }

    std::size_t flat(int i0, int i1, int i2, int i3) const {
        auto m = static_cast<std::size_t>(n_);
        return ((static_cast<std::size_t>(i0) * m + i1) * m + i2) * m + i3;
    }

    bool operator==(const Grid& o) const { return n_ == o.n_; }

private:
    int n_;
    std::vector<int> freq_;
};

} // namespace hkt
