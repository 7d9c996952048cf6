#include "hkt/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace hkt::fft {

namespace {

struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

std::mutex plan_mutex;
std::map<int, PlanPair>& plan_cache() {
    static std::map<int, PlanPair> cache;
    return cache;
}

PlanPair& plans_for(int n) {
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto& cache = plan_cache();
    auto it = cache.find(n);
    if (it != cache.end())
        return it->second;
    std::size_t sz = static_cast<std::size_t>(n) * n * n * n;
    std::vector<cplx> scratch(sz);
    auto* ptr = reinterpret_cast<fftw_complex*>(scratch.data());
    PlanPair p;
    int dims[4] = {n, n, n, n};
    p.fwd = fftw_plan_dft(4, dims, ptr, ptr, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.bwd = fftw_plan_dft(4, dims, ptr, ptr, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    return cache.emplace(n, p).first->second;
}

} // namespace

void forward(int n, std::vector<cplx>& a) {
    auto& p = plans_for(n);
    auto* ptr = reinterpret_cast<fftw_complex*>(a.data());
    fftw_execute_dft(p.fwd, ptr, ptr);
    double inv = 1.0 / static_cast<double>(a.size());
    for (auto& v : a)
        v *= inv;
}

void backward(int n, std::vector<cplx>& a) {
    auto& p = plans_for(n);
    auto* ptr = reinterpret_cast<fftw_complex*>(a.data());
    fftw_execute_dft(p.bwd, ptr, ptr);
}

std::vector<cplx> pad_spectral(const Grid& g, const std::vector<cplx>& a, int m) {
    int n = g.n();
    int h = n / 2; // modes 0..h-1 and -(n-h)..-1; Nyquist assumed zero
    std::vector<cplx> big(static_cast<std::size_t>(m) * m * m * m, cplx(0.0, 0.0));
    auto src_ix = [&](int s, int i) { return s == 0 ? i : n - h + i; };
    auto dst_ix = [&](int s, int i) { return s == 0 ? i : m - h + i; };
    auto mflat = [&](int i0, int i1, int i2, int i3) {
        auto mm = static_cast<std::size_t>(m);
        return ((static_cast<std::size_t>(i0) * mm + i1) * mm + i2) * mm + i3;
    };
    for (int s0 = 0; s0 < 2; ++s0)
        for (int s1 = 0; s1 < 2; ++s1)
            for (int s2 = 0; s2 < 2; ++s2)
                for (int s3 = 0; s3 < 2; ++s3)
                    for (int i0 = 0; i0 < h; ++i0)
                        for (int i1 = 0; i1 < h; ++i1)
                            for (int i2 = 0; i2 < h; ++i2)
                                for (int i3 = 0; i3 < h; ++i3)
                                    big[mflat(dst_ix(s0, i0), dst_ix(s1, i1), dst_ix(s2, i2), dst_ix(s3, i3))] =
                                        a[g.flat(src_ix(s0, i0), src_ix(s1, i1), src_ix(s2, i2), src_ix(s3, i3))];
    return big;
}

void truncate_spectral(const Grid& g, const std::vector<cplx>& big, int m, std::vector<cplx>& out) {
    int n = g.n();
    int h = n / 2;
    out.assign(g.size(), cplx(0.0, 0.0));
    auto src_ix = [&](int s, int i) { return s == 0 ? i : m - h + i; };
    auto dst_ix = [&](int s, int i) { return s == 0 ? i : n - h + i; };
    auto mflat = [&](int i0, int i1, int i2, int i3) {
        auto mm = static_cast<std::size_t>(m);
        return ((static_cast<std::size_t>(i0) * mm + i1) * mm + i2) * mm + i3;
    };
    for (int s0 = 0; s0 < 2; ++s0)
        for (int s1 = 0; s1 < 2; ++s1)
            for (int s2 = 0; s2 < 2; ++s2)
                for (int s3 = 0; s3 < 2; ++s3)
                    for (int i0 = 0; i0 < h; ++i0)
                        for (int i1 = 0; i1 < h; ++i1)
                            for (int i2 = 0; i2 < h; ++i2)
                                for (int i3 = 0; i3 < h; ++i3)
                                    out[g.flat(dst_ix(s0, i0), dst_ix(s1, i1), dst_ix(s2, i2), dst_ix(s3, i3))] =
                                        big[mflat(src_ix(s0, i0), src_ix(s1, i1), src_ix(s2, i2), src_ix(s3, i3))];
    // Nyquist rows of the n-grid stay zero by construction (h excludes them).
}

} // namespace hkt::fft
