#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

#include "hkt/realization.hpp"

namespace hkt {

// Matrix-valued loop on the circle |zeta| = eps presenting a holomorphic
// bundle E over the sphere: sections are pairs (u inner-holomorphic,
// v outer-holomorphic) with u = L v on the circle. Stored as values on a
// uniform theta grid together with their Fourier coefficients (L as a
// function of theta, i.e. coefficients of the eps-scaled variable).
class LoopMatrix {
public:
    LoopMatrix(double eps, int rank, std::vector<Eigen::MatrixXcd> theta_samples);

    static LoopMatrix from_function(const std::function<Eigen::MatrixXcd(cplx)>& L, double eps,
                                    int rank, int samples);
    // coefficient list: L(zeta) = sum_k C_k zeta^k on |zeta| = eps
    static LoopMatrix from_coefficients(double eps, int rank,
                                        const std::vector<std::pair<int, Eigen::MatrixXcd>>& coeffs,
                                        int samples);
    static LoopMatrix load_json(const std::string& path, int samples = 256);
    void save_json(const std::string& path) const;

    double eps() const { return eps_; }
    int rank() const { return rank_; }
    int samples() const { return samples_; }
    const Eigen::MatrixXcd& sample(int j) const { return theta_[static_cast<std::size_t>(j)]; }
    const Eigen::MatrixXcd& fourier(int k) const; // k in fft layout, -samples/2 < k <= samples/2
    double min_abs_det() const { return min_abs_det_; }

    LoopMatrix refined(int factor) const; // re-sample from the Fourier interpolant

private:
    double eps_;
    int rank_;
    int samples_;
    std::vector<Eigen::MatrixXcd> theta_;
    std::vector<Eigen::MatrixXcd> fourier_;
    double min_abs_det_;
    void compute_fourier();
};

// winding number of det L around the circle; throws if farther than 0.1 from
// an integer
int degree(const LoopMatrix& loop);

struct SectionDim {
    int dim = 0;
    bool gap_ok = true;
    double gap = 0.0; // smallest kept / largest dropped singular value
};

// dim H^0(E(k)) by the numerical kernel of the truncated matching system;
// Kmax is the Laurent truncation of the outer section
SectionDim section_space_dim(const LoopMatrix& loop, int twist, int Kmax, double rel_tol = 1e-8,
                             double gap_req = 1e3);

struct SplittingType {
    std::vector<int> indices; // k_1 >= ... >= k_m
    int deg = 0;
    bool stable = true;        // unchanged under Kmax doubling
    bool indeterminate = false;
    double min_gap = 0.0;      // worst singular-value gap over the window
};

SplittingType partial_indices(const LoopMatrix& loop, int Kmax = 16);

struct TwistorLineCheck {
    bool is_line = false;
    bool indeterminate = false;
    int deg = 0;
    int h0_minus2 = 0;
    double margin = 0.0;
};
TwistorLineCheck is_twistor_line(const LoopMatrix& loop, int n);

// Transition loop of the normal bundle N of the constant section through the
// Lagrangian point `base_pt`, built from the zeta-family of complex
// structures of the anti-diagonal lifted family using the frame
// alpha_i^{+-}(z) = I_0 v_i +- I_z v_i and its antipodal pairing. Valid for
// the flat models, where the real structure acts trivially on base points.
LoopMatrix normal_bundle_loop(const LiftedFamily& fam, const Vec8r& base_pt, double eps,
                              int samples = 64);

} // namespace hkt
