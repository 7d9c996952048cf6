#include "hkt/bundle.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace hkt {

namespace {
const double kTwoPi = 6.28318530717958647692;
const cplx kI(0.0, 1.0);
} // namespace

LoopMatrix::LoopMatrix(double eps, int rank, std::vector<Eigen::MatrixXcd> theta_samples)
    : eps_(eps), rank_(rank), samples_(static_cast<int>(theta_samples.size())),
      theta_(std::move(theta_samples)) {
    if (samples_ < 8 || samples_ % 2 != 0)
        throw std::invalid_argument("LoopMatrix: need an even number (>= 8) of samples");
    compute_fourier();
    min_abs_det_ = 1e300;
    for (const auto& L : theta_)
        min_abs_det_ = std::min(min_abs_det_, std::abs(L.determinant()));
    if (min_abs_det_ == 0.0)
        throw std::runtime_error("LoopMatrix: loop is singular on the circle");
}

void LoopMatrix::compute_fourier() {
    fourier_.assign(static_cast<std::size_t>(samples_),
                    Eigen::MatrixXcd::Zero(rank_, rank_));
    for (int k = 0; k < samples_; ++k) {
        for (int j = 0; j < samples_; ++j)
            fourier_[static_cast<std::size_t>(k)] +=
                theta_[static_cast<std::size_t>(j)] * std::exp(-kI * (kTwoPi * k * j / samples_));
        fourier_[static_cast<std::size_t>(k)] /= static_cast<double>(samples_);
    }
}

const Eigen::MatrixXcd& LoopMatrix::fourier(int k) const {
    int idx = ((k % samples_) + samples_) % samples_;
    return fourier_[static_cast<std::size_t>(idx)];
}

LoopMatrix LoopMatrix::from_function(const std::function<Eigen::MatrixXcd(cplx)>& L, double eps,
                                     int rank, int samples) {
    std::vector<Eigen::MatrixXcd> th;
    th.reserve(static_cast<std::size_t>(samples));
    for (int j = 0; j < samples; ++j)
        th.push_back(L(eps * std::exp(kI * (kTwoPi * j / samples))));
    return LoopMatrix(eps, rank, std::move(th));
}

LoopMatrix LoopMatrix::from_coefficients(double eps, int rank,
                                         const std::vector<std::pair<int, Eigen::MatrixXcd>>& coeffs,
                                         int samples) {
    return from_function(
        [&](cplx z) {
            Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(rank, rank);
            for (const auto& [k, C] : coeffs)
                acc += C * std::pow(z, k);
            return acc;
        },
        eps, rank, samples);
}

LoopMatrix LoopMatrix::refined(int factor) const {
    int M2 = samples_ * factor;
    std::vector<Eigen::MatrixXcd> th(static_cast<std::size_t>(M2),
                                     Eigen::MatrixXcd::Zero(rank_, rank_));
    for (int j = 0; j < M2; ++j) {
        double th_j = kTwoPi * j / M2;
        for (int k = -samples_ / 2 + 1; k <= samples_ / 2 - 1; ++k)
            th[static_cast<std::size_t>(j)] += fourier(k) * std::exp(kI * (th_j * k));
    }
    return LoopMatrix(eps_, rank_, std::move(th));
}

void LoopMatrix::save_json(const std::string& path) const {
    nlohmann::ordered_json j;
    j["format"] = "hkt-loop";
    j["eps"] = eps_;
    j["rank"] = rank_;
    nlohmann::ordered_json cs = nlohmann::ordered_json::array();
    for (int k = -samples_ / 2 + 1; k <= samples_ / 2 - 1; ++k) {
        const auto& C = fourier(k);
        if (C.cwiseAbs().maxCoeff() < 1e-14)
            continue;
        nlohmann::ordered_json e;
        e["k"] = k;
        std::vector<std::vector<double>> re, im;
        for (int r = 0; r < rank_; ++r) {
            std::vector<double> rr, ri;
            for (int c = 0; c < rank_; ++c) {
                rr.push_back(C(r, c).real());
                ri.push_back(C(r, c).imag());
            }
            re.push_back(rr);
            im.push_back(ri);
        }
        e["re"] = re;
        e["im"] = im;
        cs.push_back(e);
    }
    j["coefficients"] = cs;
    std::ofstream f(path);
    f << j.dump(1) << "\n";
}

LoopMatrix LoopMatrix::load_json(const std::string& path, int samples) {
    std::ifstream f(path);
    if (!f)
        throw std::runtime_error("LoopMatrix: cannot open " + path);
    nlohmann::json j;
    f >> j;
    double eps = j.at("eps").get<double>();
    int rank = j.at("rank").get<int>();
    std::vector<std::pair<int, Eigen::MatrixXcd>> coeffs;
    for (const auto& e : j.at("coefficients")) {
        int k = e.at("k").get<int>();
        Eigen::MatrixXcd C(rank, rank);
        for (int r = 0; r < rank; ++r)
            for (int c = 0; c < rank; ++c)
                C(r, c) = cplx(e.at("re")[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)],
                               e.at("im")[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
        coeffs.emplace_back(k, C);
    }
    // Fourier coefficients in the file refer to zeta^k on |zeta| = eps
    return from_coefficients(eps, rank, coeffs, samples);
}

int degree(const LoopMatrix& loop) {
    int M = loop.samples();
    double acc = 0.0;
    cplx prev = loop.sample(0).determinant();
    for (int j = 1; j <= M; ++j) {
        cplx cur = loop.sample(j % M).determinant();
        acc += std::arg(cur / prev);
        prev = cur;
    }
    double w = acc / kTwoPi;
    double r = std::round(w);
    if (std::abs(w - r) > 0.1)
        throw std::runtime_error("degree: winding number ambiguous (" + std::to_string(w) + ")");
    return static_cast<int>(r);
}

SectionDim section_space_dim(const LoopMatrix& loop, int twist, int Kmax, double rel_tol,
                             double gap_req) {
    int m = loop.rank();
    int M = loop.samples();
    int KL = M / 2 - 1;
    int ncols_j = Kmax + twist + 1; // j = -Kmax .. twist
    SectionDim out;
    if (ncols_j <= 0) {
        out.dim = 0;
        out.gap = std::numeric_limits<double>::infinity();
        return out;
    }
    int nrows_f = Kmax + KL; // f = -1 .. -(Kmax + KL)
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(nrows_f) * m,
                                                static_cast<Eigen::Index>(ncols_j) * m);
    for (int fi = 0; fi < nrows_f; ++fi) {
        int fmode = -1 - fi;
        for (int ji = 0; ji < ncols_j; ++ji) {
            int jmode = -Kmax + ji;
            int kk = fmode - jmode;
            if (kk < -KL || kk > KL)
                continue;
            A.block(static_cast<Eigen::Index>(fi) * m, static_cast<Eigen::Index>(ji) * m, m, m) =
                loop.fourier(kk);
        }
    }
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(A);
    const auto& sv = svd.singularValues();
    double smax = sv.size() ? sv(0) : 1.0;
    int small = 0;
    double largest_small = 0.0, smallest_big = smax;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) < rel_tol * smax) {
            ++small;
            largest_small = std::max(largest_small, sv(i));
        } else {
            smallest_big = std::min(smallest_big, sv(i));
        }
    }
    int ncols = ncols_j * m;
    out.dim = ncols - (static_cast<int>(sv.size()) - small);
    // columns beyond the number of singular values (wide matrices) are free
    if (static_cast<Eigen::Index>(ncols) > sv.size())
        out.dim = ncols - static_cast<int>(sv.size()) + small;
    out.gap = (small > 0 && largest_small > 0.0) ? smallest_big / largest_small
                                                 : std::numeric_limits<double>::infinity();
    out.gap_ok = out.gap >= gap_req;
    return out;
}

SplittingType partial_indices(const LoopMatrix& loop, int Kmax) {
    SplittingType out;
    out.deg = degree(loop);
    int m = loop.rank();
    int window = std::abs(out.deg) + 3;
    auto profile = [&](int K) {
        std::vector<int> dims;
        out.min_gap = std::numeric_limits<double>::infinity();
        for (int k = -window; k <= window; ++k) {
            SectionDim sd = section_space_dim(loop, k, K);
            if (!sd.gap_ok)
                out.indeterminate = true;
            out.min_gap = std::min(out.min_gap, sd.gap);
            dims.push_back(sd.dim);
        }
        return dims;
    };
    std::vector<int> d1 = profile(Kmax);
    std::vector<int> d2 = profile(2 * Kmax);
    out.stable = (d1 == d2);
    if (!out.stable)
        out.indeterminate = true;
    // counts[k] = d(k) - d(k-1) = #{ k_i >= -k }; multiplicity of index (-k)
    // is counts[k] - counts[k-1]
    std::vector<int> counts;
    for (std::size_t i = 1; i < d2.size(); ++i)
        counts.push_back(d2[i] - d2[i - 1]);
    for (std::size_t i = 1; i < counts.size(); ++i) {
        int mult = counts[i] - counts[i - 1];
        if (mult < 0) {
            out.indeterminate = true;
            continue;
        }
        int kval = -(-window + 1 + static_cast<int>(i));
        for (int t = 0; t < mult; ++t)
            out.indices.push_back(kval);
    }
    std::sort(out.indices.begin(), out.indices.end(), std::greater<int>());
    int sum = 0;
    for (int k : out.indices)
        sum += k;
    if (static_cast<int>(out.indices.size()) != m || sum != out.deg)
        out.indeterminate = true;
    return out;
}

TwistorLineCheck is_twistor_line(const LoopMatrix& loop, int n) {
    TwistorLineCheck out;
    out.deg = degree(loop);
    if (loop.rank() != 2 * n) {
        out.is_line = false;
        return out;
    }
    SectionDim sd = section_space_dim(loop, -2, 16);
    SectionDim sd2 = section_space_dim(loop, -2, 32);
    out.indeterminate = !sd.gap_ok || !sd2.gap_ok || sd.dim != sd2.dim;
    out.h0_minus2 = sd2.dim;
    out.margin = std::min(sd.gap, sd2.gap);
    out.is_line = !out.indeterminate && out.deg == 2 * n && out.h0_minus2 == 0;
    return out;
}

LoopMatrix normal_bundle_loop(const LiftedFamily& fam, const Vec8r& base_pt, double eps,
                              int samples) {
    const RealizationModel& mo = fam.model();
    // complexified I_0 (holo +i / anti -i) and the complexified I_zeta from
    // the kernel of the anti-diagonal family
    Mat8 I0 = Mat8::Zero();
    for (int i = 0; i < 4; ++i) {
        I0(i, i) = kI;
        I0(4 + i, 4 + i) = -kI;
    }
    auto Ic_from = [&](const KernelCheck& kc) -> Mat8 {
        Mat8 B;
        B.leftCols<4>() = mo.conj_swap() * kc.basis.conjugate();
        B.rightCols<4>() = kc.basis;
        Mat8 D = Mat8::Zero();
        for (int i = 0; i < 4; ++i) {
            D(i, i) = kI;
            D(4 + i, 4 + i) = -kI;
        }
        return B * D * B.inverse();
    };
    // X-tangent basis v_1 = d/dx1, v_2 = d/dx3 pushed into M through d iota
    Eigen::Matrix<cplx, 8, 2> V;
    Eigen::Matrix<cplx, 4, 2> vx;
    vx.setZero();
    vx(0, 0) = 1.0;
    vx(2, 0) = 1.0; // d/dx1 = dz1 + dzb1
    vx(1, 1) = 1.0;
    vx(3, 1) = 1.0; // d/dx3 = dz2 + dzb2
    V = mo.d_iota() * vx;
    // coordinates of w modulo ker(Omega_z) in the constant T^{1,0} frame
    auto coords = [&](const Eigen::Matrix<cplx, 8, 1>& w, const KernelCheck& kc) {
        Mat8 Mx;
        Mx.setZero();
        Mx.topLeftCorner<4, 4>() = Mat4::Identity();
        Mx.rightCols<4>() = kc.basis;
        Eigen::Matrix<cplx, 8, 1> x = Mx.partialPivLu().solve(w);
        return Eigen::Matrix<cplx, 4, 1>(x.head<4>());
    };
    std::vector<Eigen::MatrixXcd> th;
    th.reserve(static_cast<std::size_t>(samples));
    for (int j = 0; j < samples; ++j) {
        cplx z = eps * std::exp(kI * (kTwoPi * j / samples));
        KernelCheck kc_in = kernel_check(fam, kI * z, -kI * z, base_pt);
        KernelCheck kc_out = kernel_check(fam, kI * (-z), -kI * (-z), base_pt);
        if (kc_in.indeterminate || kc_out.indeterminate)
            throw std::runtime_error("normal_bundle_loop: kernel indeterminate");
        Mat8 Iz_in = Ic_from(kc_in);
        Mat8 Iz_out = Ic_from(kc_out);
        Eigen::Matrix<cplx, 4, 4> C, D;
        for (int vi = 0; vi < 2; ++vi) {
            Eigen::Matrix<cplx, 8, 1> v = V.col(vi);
            Eigen::Matrix<cplx, 8, 1> ap = I0 * v + Iz_in * v;
            Eigen::Matrix<cplx, 8, 1> am = I0 * v - Iz_in * v;
            C.col(vi) = coords(ap, kc_in);
            C.col(2 + vi) = coords(am, kc_in);
            // outer reads at rho_eps(z) = -z on the circle, with the roles of
            // alpha^+ and alpha^- exchanged; outer frame is the conjugate one
            Eigen::Matrix<cplx, 8, 1> ap_o = I0 * v + Iz_out * v;
            Eigen::Matrix<cplx, 8, 1> am_o = I0 * v - Iz_out * v;
            D.col(vi) = coords(am_o, kc_out).conjugate();
            D.col(2 + vi) = coords(ap_o, kc_out).conjugate();
        }
        th.push_back(C * D.inverse());
    }
    return LoopMatrix(eps, 4, std::move(th));
}

} // namespace hkt
